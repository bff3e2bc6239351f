"""Command-line interface: ``rmanyons <subcommand> [flags]``.

Every subcommand prints JSON (``export-dot`` prints DOT).  Exit status is 0
on success, 1 when a check fails, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import acceptance, anyon, bratteli, fusion, qtorus, quadratic
from ._json import dumps
from .errors import BadParams, RMAnyonError
from .quadratic import CFExpansion, QuadExpr, QuadraticIrrational, UnimodularMatrix

PRESETS = {
    "golden": quadratic.GOLDEN,
    "tau": quadratic.GOLDEN,
    "silver": quadratic.SILVER,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing helpers


def _json_arg(text: str, flag: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: invalid JSON ({exc.msg})") from None


def parse_theta(text: Optional[str]) -> QuadraticIrrational:
    if text is None:
        raise UsageError("--theta is required")
    if text.lower() in PRESETS:
        return PRESETS[text.lower()]
    obj = _json_arg(text, "--theta")
    try:
        if isinstance(obj, dict) and {"P", "Q", "D"} <= set(obj):
            return QuadraticIrrational(int(obj["P"]), int(obj["Q"]), int(obj["D"]))
        if isinstance(obj, dict) and "period" in obj:
            return CFExpansion.from_json({"preperiod": obj.get("preperiod", []), **obj}).value()
        if isinstance(obj, dict) and {"x", "y", "d"} <= set(obj):
            return QuadraticIrrational.from_quad(QuadExpr.from_json(obj))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--theta: {exc}") from None
    raise UsageError('--theta: expected a preset name, {"P","Q","D"}, {"x","y","d"} or {"preperiod","period"}')


def parse_matrix(text: Optional[str], flag: str = "--matrix", square: bool = True) -> tuple[tuple[int, ...], ...]:
    if text is None:
        raise UsageError(f"{flag} is required")
    obj = _json_arg(text, flag)
    if not (isinstance(obj, list) and obj and all(isinstance(r, list) for r in obj)):
        raise UsageError(f"{flag}: expected a JSON list of rows")
    try:
        rows = tuple(tuple(int(v) for v in row) for row in obj)
    except (TypeError, ValueError):
        raise UsageError(f"{flag}: entries must be integers") from None
    if square and any(len(r) != len(rows) for r in rows):
        raise UsageError(f"{flag}: expected a square matrix")
    return rows


def parse_unimodular(text: Optional[str]) -> UnimodularMatrix:
    rows = parse_matrix(text)
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise UsageError("--matrix: expected a 2x2 matrix")
    try:
        return UnimodularMatrix.from_rows(rows)
    except ValueError as exc:
        raise UsageError(f"--matrix: {exc}") from None


def parse_complex(text: str, flag: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"{flag}: cannot parse {text!r} as a complex number") from None


def parse_q(text: str, exact: bool):
    """``--q`` as a Fraction for exact runs, otherwise a complex number."""
    if not exact:
        return parse_complex(text, "--q")
    try:
        return Fraction(text)
    except ValueError:
        raise UsageError(f"--q: exact mode needs a rational such as 1/3, got {text!r}") from None


def _operator_arg(obj, flag: str) -> np.ndarray:
    """A matrix given as operator JSON, nested rows, or a flat row-major list."""
    if isinstance(obj, dict):
        return anyon.operator_from_json(obj)
    flat = []

    def walk(x):
        # a [re, im] pair of numbers is one complex entry
        if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
            flat.append(complex(*x))
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            flat.append(complex(x))

    walk(obj)
    size = int(round(len(flat) ** 0.5))
    if size * size != len(flat):
        raise ValueError(f"{flag}: {len(flat)} entries do not form a square matrix")
    return np.array(flat).reshape(size, size)


def resolve_tol(args, default: float) -> float:
    if args.tol is None:
        return default
    if args.tol > default and not args.allow_loose:
        raise UsageError(f"--tol {args.tol:g} is looser than the default {default:g}; pass --allow-loose")
    return args.tol


def _diagram(args) -> bratteli.BratteliDiagram:
    levels = args.levels
    if args.fibonacci:
        return bratteli.fibonacci_diagram(levels, root=args.fibonacci)
    if args.matrix is not None:
        phi = parse_matrix(args.matrix)
        root = parse_matrix(f"[[{args.root}]]", "--root", square=False)[0] if args.root else phi[0]
        return bratteli.BratteliDiagram.stationary(phi, levels, root)
    if args.theta is not None:
        return bratteli.from_continued_fraction(quadratic.cf_expand(parse_theta(args.theta)), levels, args.convention)
    raise UsageError("one of --theta, --matrix or --fibonacci is required")


def _frdata(args) -> anyon.FRData:
    if args.frdata:
        obj = _json_arg(args.frdata, "--frdata")
        try:
            t = complex(*obj.get("t", [1.0, 0.0]))
            F = _operator_arg(obj["F"], "F")
            R = np.array([complex(*x) if isinstance(x, list) else complex(x) for x in obj["R"]])
            if F.shape != (2, 2) or R.shape != (2,):
                raise ValueError("expected a 2x2 F and two R values")
            return anyon.FRData(t, F, R)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"--frdata: {exc}") from None
    if args.trivial:
        return anyon.FRData.trivial()
    return anyon.FRData.golden()


# ---------------------------------------------------------------------------
# subcommands: each returns (payload, passed)


def cmd_cf(args):
    cf = quadratic.cf_expand(parse_theta(args.theta))
    out = cf.to_json()
    if args.n:
        out["convergents"] = [list(pq) for pq in cf.convergents(args.n)]
    return out, True


def cmd_fix(args):
    theta = parse_theta(args.theta)
    g = quadratic.fixing_matrix(theta, periods=args.periods)
    out = {"theta": theta.to_json(), "g": g.tolist(), "det": g.det, "trace": g.trace, "fixes": quadratic.fixes(g, theta)}
    try:
        f = quadratic.reduced_factorization(g)
        out["reduced_factorization"] = {"digits": list(f.digits), "primitive_power": f.primitive_power}
    except RMAnyonError as exc:
        out["reduced_factorization"] = {"error": type(exc).__name__, "message": str(exc)}
    return out, out["fixes"]


def cmd_bratteli(args):
    d = _diagram(args)
    return {**d.to_json(), "ranks": [list(r) for r in d.rank_vectors()],
            "path_totals": [sum(bratteli.path_counts(d, n)) for n in range(d.n_levels)]}, True


def cmd_telescope(args):
    d = _diagram(args)
    cuts = _json_arg(args.cuts, "--cuts") if args.cuts else list(range(0, d.n_levels, 2))
    try:
        t = bratteli.telescope(d, [int(c) for c in cuts])
    except ValueError as exc:
        raise UsageError(f"--cuts: {exc}") from None
    return {"cuts": cuts, **t.to_json()}, True


def cmd_k0(args):
    phi = parse_matrix(args.matrix)
    if len(phi) != 2:
        raise UsageError("--matrix: exact ordered K0 needs a 2x2 matrix")
    return bratteli.k0_stationary(phi, which_eigvec=args.eigvec).to_json(), True


def cmd_quasitype(args):
    return bratteli.k0_quasi_type(parse_matrix(args.matrix)).to_json(), True


def cmd_fusion_check(args):
    if args.fusion:
        try:
            F = fusion.FusionSystem.from_json(_json_arg(args.fusion, "--fusion"))
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"--fusion: {exc}") from None
    else:
        F = fusion.FusionSystem.two_label(args.trace)
    tol = resolve_tol(args, 1e-9)
    report = fusion.verify_axioms(F)
    out = {"fusion": F.to_json(), "axioms": report.to_json()}
    passed = report.passed
    try:
        spectral = fusion.simultaneous_eigen(F)
        v = fusion.verlinde_check(F, spectral)
        out.update(
            eigenvalues=spectral.eigenvalues, S=spectral.S, spectral_residual=spectral.residual, verlinde=v,
            quantum_dimensions=F.quantum_dimensions(), total_dimension=F.total_dimension(),
        )
        passed &= v <= tol
    except RMAnyonError as exc:
        out["spectral_error"] = str(exc)
        passed = False
    return out, passed


def cmd_rm_anyon(args):
    system = fusion.rm_anyon_system(parse_theta(args.theta))
    c = system.checks
    ok = c["symmetry"] <= 1e-12 and c["involution"] <= 1e-12 and c["swap_eigen_residual"] <= 1e-10
    return system.to_json(), ok


def cmd_smatrix(args):
    system = fusion.rm_anyon_system(parse_theta(args.theta))
    tol = resolve_tol(args, 1e-10)
    c = system.checks
    lam = float(system.lam)
    out = {"lambda": lam, "normalization": 1 / math.sqrt(1 + lam * lam), "S_tilde": system.S, "checks": c,
           "convention": "columns diagonalize the swap conjugate [[0,1],[1,Tr g]]"}
    return out, c["symmetry"] <= 1e-12 and c["involution"] <= 1e-12 and c["swap_eigen_residual"] <= tol


def cmd_k0class(args):
    theta = parse_theta(args.theta)
    g = parse_unimodular(args.matrix) if args.matrix else fusion.rm_anyon_system(theta).g
    cls = fusion.k0_class_of_power(g, theta, args.k)
    out = {"g": g.tolist(), "k": args.k, "class": cls.to_json(), "exact": cls.value.to_json()}
    try:
        a, b = fusion.decompose_nonneg(cls, g, theta)
        out["decomposition"] = {"E_g": a, "unit": b}
    except RMAnyonError as exc:
        out["decomposition"] = {"error": type(exc).__name__, "message": str(exc)}
    return out, True


def cmd_pentagon(args):
    if args.search is not None:
        return anyon.pentagon_search(args.search, starts=args.starts, seed=args.seed), True
    d = _frdata(args)
    tol = resolve_tol(args, 1e-12)
    r = anyon.pentagon_check(d)
    return {"residual": r, "full_residual": anyon.full_pentagon_check(d), "pass": r <= tol, "tol": tol}, r <= tol


def cmd_hexagon(args):
    d = _frdata(args)
    tol = resolve_tol(args, 1e-12)
    r = anyon.hexagon_check(d)
    return {"residual": r, "pass": r <= tol, "tol": tol}, r <= tol


def cmd_braid(args):
    word = anyon.BraidWord.from_json(_json_arg(args.word or "[]", "--word"))
    d = _frdata(args)
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    n = args.n
    M = anyon.apply_braid_word(word, n, d, args.total_charge)
    eye = np.eye(len(M))
    unit = float(np.linalg.norm(M @ M.conj().T - eye, 2))
    out = {
        "n": n,
        "dimension": len(M),
        "word": word.to_json(),
        "normal_form": word.commuting_normal_form().to_json(),
        "identity": bool(np.allclose(M, eye, atol=1e-12)),
        "unitarity_residual": unit,
        "operator": anyon.operator_to_json(M),
    }
    return out, unit <= 1e-12


def cmd_dimfun(args):
    f = bratteli.fibonacci_dimension_function(args.kind, args.levels)
    L = args.L if args.L is not None else (args.levels - 1 if args.enumeration == "level" else 2 * args.levels - 2)
    word = anyon.dimension_function_to_braid(f, L, args.enumeration)
    checks = f.check()
    return {"kind": args.kind, **f.to_json(), "vertex_values": f.vertex_values(),
            "equation_holds": all(ok for *_, ok in checks), "braid_word": word.to_json()}, all(ok for *_, ok in checks)


def cmd_gates(args):
    tol = resolve_tol(args, 1e-13)
    if args.p is not None:
        gates = qtorus.clock_shift(args.p, args.q)
    else:
        gates = qtorus.convergent_gates(parse_theta(args.theta), args.n or 1)
    out = gates.to_json()
    if args.full:
        out.update(U=anyon.operator_to_json(gates.U), V=anyon.operator_to_json(gates.V))
    return out, out["commutation_residual"] <= tol


def cmd_weyl_pentagon(args):
    q = parse_q(args.q, args.exact)
    tol = resolve_tol(args, 1e-10)
    r = qtorus.weyl_pentagon_check(q, args.degree, drop_middle=args.drop_middle, exact=args.exact)
    return {"q": q, "degree": args.degree, "drop_middle": args.drop_middle, "exact": args.exact,
            "residual": r, "pass": r <= tol, "tol": tol}, r <= tol


def cmd_qdilog(args):
    N = args.order
    zeta = cmath.exp(2j * math.pi * args.p / N)
    z = parse_complex(args.z, "--z")
    log: list = []
    value = qtorus.qdilog_root_of_unity(zeta, N, z, log)
    return {"order": N, "p": args.p, "zeta": zeta, "z": z, "value": value, "branch_log": log}, True


def cmd_dilog_pentagon(args):
    if args.u is not None or args.v is not None:
        if args.u is None or args.v is None:
            raise UsageError("--u and --v must be given together")
        pairs = [(parse_complex(args.u, "--u"), parse_complex(args.v, "--v"))]
    else:
        pairs = qtorus.sample_unit_pairs(args.samples, args.seed)
    reports = [qtorus.dilog_pentagon_residual(args.p, args.q, u, v) for u, v in pairs]
    return {"seed": args.seed, "reports": reports}, True


def cmd_cone_compare(args):
    theta = parse_theta(args.theta)
    g = parse_unimodular(args.matrix) if args.matrix else quadratic.fixing_matrix(theta)
    return bratteli.cone_compare(theta, g, bound=args.bound), True


def cmd_export_dot(args):
    return _diagram(args).to_dot(), True


def cmd_verify_all(args):
    results = acceptance.run_all()
    return {"criteria": [r.to_json() for r in results], "pass": all(r.passed for r in results)}, all(
        r.passed for r in results
    )


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmanyons", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--tol", type=float, help="override the check tolerance")
    common.add_argument("--allow-loose", action="store_true", help="permit --tol looser than the default")
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func: Callable, help_: str, *flags: str):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        for flag in flags:
            ARGS[flag](p)
        return p

    ARGS = {
        "theta": lambda p: p.add_argument("--theta", help='preset (golden, silver) or JSON {"P","Q","D"}'),
        "matrix": lambda p: p.add_argument("--matrix", help="JSON integer matrix, e.g. [[1,1],[1,0]]"),
        "levels": lambda p: p.add_argument("--levels", type=int, default=6),
        "n": lambda p: p.add_argument("--n", type=int),
        "diagram": lambda p: (
            p.add_argument("--fibonacci", choices=["vacuum", "anyon"]),
            p.add_argument("--root", help="root row for --matrix, e.g. 1,0"),
            p.add_argument("--convention", choices=["standard", "flipped"], default="standard"),
        ),
        "frdata": lambda p: (
            p.add_argument("--golden", action="store_true", help="the golden Fibonacci F/R data (default)"),
            p.add_argument("--trivial", action="store_true", help="the one-label system"),
            p.add_argument("--frdata", help='JSON {"t":[re,im],"F":[[re,im],...],"R":[[re,im],...]}'),
        ),
    }

    add("cf", cmd_cf, "continued fraction expansion", "theta", "n")
    p = add("fix", cmd_fix, "fixing matrix in GL2(Z)", "theta")
    p.add_argument("--periods", type=int, default=1)
    add("bratteli", cmd_bratteli, "Bratteli diagram", "theta", "matrix", "levels", "diagram")
    p = add("telescope", cmd_telescope, "telescoped Bratteli diagram", "theta", "matrix", "levels", "diagram")
    p.add_argument("--cuts", help="JSON list of levels to keep")
    p = add("k0", cmd_k0, "ordered K0 of a stationary diagram", "matrix")
    p.add_argument("--eigvec", choices=["right", "left"], default="right")
    add("quasitype", cmd_quasitype, "quasi-isomorphism type of K0", "matrix")
    p = add("fusion-check", cmd_fusion_check, "fusion axioms, spectra and Verlinde")
    p.add_argument("--trace", type=int, default=1)
    p.add_argument("--fusion", help='JSON {"labels","dual","N"}')
    add("rm-anyon", cmd_rm_anyon, "real-multiplication anyon system", "theta")
    add("smatrix", cmd_smatrix, "S-tilde matrix", "theta")
    p = add("k0class", cmd_k0class, "K0 class of a power of g", "theta", "matrix")
    p.add_argument("--k", type=int, default=1)
    p = add("pentagon", cmd_pentagon, "pentagon residual", "frdata")
    p.add_argument("--search", type=int, metavar="TRACE", help="exploratory solution search")
    p.add_argument("--starts", type=int, default=24)
    add("hexagon", cmd_hexagon, "hexagon residual", "frdata")
    p = add("braid", cmd_braid, "braid word operator", "frdata")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--word", help='JSON [{"gen":1,"exp":1},...]')
    p.add_argument("--total-charge", type=int, choices=[0, 1])
    p = add("dimfun", cmd_dimfun, "dimension function and its braid word", "levels")
    p.add_argument("--kind", choices=sorted(bratteli.FIBONACCI_SEEDS), default="1")
    p.add_argument("--L", type=int)
    p.add_argument("--enumeration", choices=["vertex", "level"], default="vertex")
    p = add("gates", cmd_gates, "clock/shift gates", "theta", "n")
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--full", action="store_true", help="include the matrices")
    p = add("weyl-pentagon", cmd_weyl_pentagon, "formal dilogarithm pentagon")
    p.add_argument("--q", default="0.3")
    p.add_argument("--degree", type=int, default=10)
    p.add_argument("--drop-middle", action="store_true")
    p.add_argument("--exact", action="store_true", help="rational arithmetic")
    p = add("qdilog", cmd_qdilog, "quantum dilogarithm at a root of unity")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--z", required=True)
    p = add("dilog-pentagon", cmd_dilog_pentagon, "root-of-unity pentagon diagnostic")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--u")
    p.add_argument("--v")
    p.add_argument("--samples", type=int, default=1)
    p = add("cone-compare", cmd_cone_compare, "compare positive cones of g and N1", "theta", "matrix")
    p.add_argument("--bound", type=int, default=3)
    add("export-dot", cmd_export_dot, "Bratteli diagram as DOT", "theta", "matrix", "levels", "diagram")
    add("verify-all", cmd_verify_all, "run the acceptance suite")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, passed = args.func(args)
    except (UsageError, BadParams) as exc:
        sys.stderr.write(f"rmanyons {args.command}: {exc}\n")
        return 2
    except RMAnyonError as exc:
        _emit(dumps({"error": type(exc).__name__, "message": str(exc)}), args.out)
        return 1
    _emit(payload if isinstance(payload, str) else dumps(payload), args.out)
    return 0 if passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
