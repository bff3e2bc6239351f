"""Fusion-path spaces, F/R data, pentagon and hexagon checks, and braid representations.

Labels are integers: ``0`` is the vacuum and ``1`` the nontrivial anyon of a
two-label system.  A basis path for ``n`` anyons is the tuple
``(y_1, ..., y_{n-1})`` where ``y_k`` is the total charge of the first
``k + 1`` anyons; the first anyon alone carries charge ``y_0 = 1``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .bratteli import DimensionFunction
from .fusion import FusionSystem

TAU = (1 + math.sqrt(5)) / 2


# ---------------------------------------------------------------------------
# Fusion paths


@dataclass(frozen=True)
class FusionPathBasis:
    n: int
    paths: tuple[tuple[int, ...], ...]
    multiplicities: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return sum(self.multiplicities)

    def index(self, path: Sequence[int]) -> int:
        return self.paths.index(tuple(path))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "paths": [list(p) for p in self.paths],
            "multiplicities": list(self.multiplicities),
            "dimension": self.dimension,
        }


def enumerate_paths(
    F: FusionSystem, n: int, anyon: int = 1, total_charge: Optional[int] = None
) -> FusionPathBasis:
    """All admissible charge sequences for ``n`` copies of ``anyon``, lexicographic.

    ``multiplicities[p]`` is the product of fusion multiplicities along path ``p``,
    so ``dimension`` counts multiplicity-labelled trees.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    N = F.N
    layer: list[tuple[tuple[int, ...], int]] = [((), 1)]
    for _ in range(n - 1):
        nxt = []
        for path, mult in layer:
            prev = path[-1] if path else anyon
            for y in range(F.rank):
                if N[prev][anyon][y]:
                    nxt.append((path + (y,), mult * N[prev][anyon][y]))
        layer = nxt
    if total_charge is not None:
        layer = [(p, m) for p, m in layer if (p[-1] if p else anyon) == total_charge]
    layer.sort()
    return FusionPathBasis(n, tuple(p for p, _ in layer), tuple(m for _, m in layer))


# ---------------------------------------------------------------------------
# F and R data for two-label multiplicity-free systems


@dataclass(frozen=True, eq=False)
class FRData:
    """``t = F^{111}_0``, ``F = F^{111}_1`` in the basis (vacuum, anyon), ``R = (R_0, R_1)``.

    ``rank == 1`` is the one-label system, where only ``t`` and ``R[0]`` matter.
    """

    t: complex
    F: np.ndarray
    R: np.ndarray
    rank: int = 2

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "F", np.asarray(self.F, dtype=complex))
        object.__setattr__(self, "R", np.asarray(self.R, dtype=complex).reshape(-1))

    @classmethod
    def golden(cls) -> "FRData":
        a, b = 1 / TAU, 1 / math.sqrt(TAU)
        return cls(
            1.0,
            np.array([[a, b], [b, -a]]),
            np.array([cmath.exp(4j * math.pi / 5), -cmath.exp(2j * math.pi / 5)]),
        )

    @classmethod
    def trivial(cls) -> "FRData":
        return cls(1.0, np.eye(1), np.ones(1), rank=1)

    def with_F_entry(self, i: int, j: int, delta: complex) -> "FRData":
        F = self.F.copy()
        F[i, j] += delta
        return FRData(self.t, F, self.R, self.rank)

    def blocks(self) -> dict[tuple[int, int, int, int], np.ndarray]:
        """Nontrivial F blocks keyed by ``(a, b, c, d)`` for the full pentagon."""
        if self.rank == 1:
            return {}
        return {(1, 1, 1, 0): np.array([[self.t]]), (1, 1, 1, 1): self.F}

    def to_json(self) -> dict:
        return {
            "t": [self.t.real, self.t.imag],
            "F": operator_to_json(self.F),
            "R": [[r.real, r.imag] for r in self.R],
            "rank": self.rank,
        }


def _norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def pentagon_check(d: FRData) -> float:
    """Larger operator-norm residual of the two reduced pentagon matrix equations."""
    if d.rank == 1:
        return abs(d.t * d.t - d.t * d.t * d.t)
    t = d.t
    (p, q), (r, s) = d.F
    D = np.diag([1, t])
    first = D @ D - d.F @ D @ d.F
    A = np.array([[1, 0, 0], [0, p, q], [0, r, s]])
    P = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    B = np.array([[p, 0, q], [0, t, 0], [r, 0, s]])
    second = A @ P @ A - B @ A @ B
    return max(_norm(first), _norm(second))


def hexagon_check(d: FRData) -> float:
    """Residual of the hexagon instances with all three legs the nontrivial anyon.

    Total charge 1: ``R F R = F diag(1, R_1) F``; total charge 0:
    ``R_1 t R_1 = t R_0 t``.  Both are also checked with ``R`` inverted.
    """
    if d.rank == 1:
        r = d.R[0]
        return max(abs(r * d.t * r - d.t * r * d.t), abs(d.t / r / r - d.t * d.t / r))
    worst = 0.0
    for R in (d.R, 1 / d.R):
        Rd = np.diag(R)
        worst = max(
            worst,
            _norm(Rd @ d.F @ Rd - d.F @ np.diag([1, R[1]]) @ d.F),
            abs(R[1] * d.t * R[1] - d.t * R[0] * d.t),
        )
    return worst


# ---------------------------------------------------------------------------
# Full pentagon with multiplicity indices, used for the exploratory search


class PentagonSystem:
    """Pentagon equations of a fusion system as a sparse polynomial system.

    Blocks ``F^{abc}_d`` map the left basis ``(e, alpha in V^e_ab, beta in V^d_ec)``
    to the right basis ``(f, mu in V^f_bc, nu in V^d_af)``.  Blocks with a vacuum
    leg are gauge-fixed to the identity; the rest are unknowns.
    """

    def __init__(self, F: FusionSystem):
        self.fusion = F
        N, labels = F.N, range(F.rank)
        self.bases = {}
        self.unknown: dict[tuple, tuple[int, int]] = {}
        offset = 0
        for a, b, c, d in itertools.product(labels, repeat=4):
            left = [
                (e, al, be) for e in labels for al in range(N[a][b][e]) for be in range(N[e][c][d])
            ]
            right = [
                (f, mu, nu) for f in labels for mu in range(N[b][c][f]) for nu in range(N[a][f][d])
            ]
            if len(left) != len(right):
                raise ValueError("fusion rules are not associative")
            if not left:
                continue
            self.bases[(a, b, c, d)] = (
                {v: i for i, v in enumerate(left)},
                {v: i for i, v in enumerate(right)},
            )
            if a and b and c:
                self.unknown[(a, b, c, d)] = (offset, len(left))
                offset += len(left) ** 2
        self.n_unknowns = offset
        self.ONE, self.ZERO = offset, offset + 1
        self._compile()

    def _entry(self, key, left, right) -> int:
        li, ri = self.bases[key]
        i, j = li[left], ri[right]
        if key in self.unknown:
            off, n = self.unknown[key]
            return off + i * n + j
        return self.ONE if i == j else self.ZERO

    def _compile(self) -> None:
        N, labels = self.fusion.N, range(self.fusion.rank)
        V = lambda x, y, z: range(N[x][y][z])  # noqa: E731
        lrow, l1, l2 = [], [], []
        rrow, r1, r2, r3 = [], [], [], []
        row = 0
        for a, b, c, d, e in itertools.product(labels, repeat=5):
            starts = [
                (f, al, g, be, ga)
                for f in labels for al in V(a, b, f)
                for g in labels for be in V(f, c, g)
                for ga in V(g, d, e)
            ]
            ends = [
                (l, de, k, mu, la)
                for l in labels for de in V(c, d, l)
                for k in labels for mu in V(b, l, k)
                for la in V(a, k, e)
            ]
            for (f, al, g, be, ga), (l, de, k, mu, la) in itertools.product(starts, ends):
                for nu in V(f, l, e):
                    x = self._entry((f, c, d, e), (g, be, ga), (l, de, nu))
                    y = self._entry((a, b, l, e), (f, al, nu), (k, mu, la))
                    if self.ZERO not in (x, y):
                        lrow.append(row), l1.append(x), l2.append(y)
                for h in labels:
                    for si, ps, rh in itertools.product(V(b, c, h), V(a, h, g), V(h, d, k)):
                        x = self._entry((a, b, c, g), (f, al, be), (h, si, ps))
                        y = self._entry((a, h, d, e), (g, ps, ga), (k, rh, la))
                        z = self._entry((b, c, d, k), (h, si, rh), (l, de, mu))
                        if self.ZERO not in (x, y, z):
                            rrow.append(row), r1.append(x), r2.append(y), r3.append(z)
                row += 1
        self.n_equations = row
        self._l = tuple(np.array(v, dtype=int) for v in (lrow, l1, l2))
        self._r = tuple(np.array(v, dtype=int) for v in (rrow, r1, r2, r3))

    def pack(self, blocks: dict) -> np.ndarray:
        x = np.zeros(self.n_unknowns, dtype=complex)
        for key, (off, n) in self.unknown.items():
            x[off : off + n * n] = np.asarray(blocks[key], dtype=complex).reshape(-1)
        return x

    def unpack(self, x: np.ndarray) -> dict:
        return {key: x[off : off + n * n].reshape(n, n) for key, (off, n) in self.unknown.items()}

    def residuals(self, x: np.ndarray) -> np.ndarray:
        z = np.concatenate([np.asarray(x, dtype=complex), [1.0, 0.0]])
        out = np.zeros(self.n_equations, dtype=complex)
        rows, i, j = self._l
        np.add.at(out, rows, z[i] * z[j])
        rows, i, j, k = self._r
        np.add.at(out, rows, -z[i] * z[j] * z[k])
        return out

    def unitarity(self, x: np.ndarray) -> np.ndarray:
        parts = [
            (X @ X.conj().T - np.eye(len(X))).reshape(-1) for X in self.unpack(np.asarray(x)).values()
        ]
        return np.concatenate(parts) if parts else np.zeros(0)

    def residual(self, blocks: dict) -> float:
        r = self.residuals(self.pack(blocks))
        return float(np.max(np.abs(r))) if r.size else 0.0


def full_pentagon_check(d: FRData) -> float:
    """Max entrywise residual of every pentagon equation of the two-label system."""
    F = FusionSystem.fibonacci() if d.rank == 2 else FusionSystem.trivial()
    return PentagonSystem(F).residual(d.blocks())


def pentagon_search(
    trace: int, starts: int = 24, seed: int = 0, tol: float = 1e-9, max_nfev: int = 1000
) -> dict:
    """Exploratory least-squares search for unitary pentagon solutions.

    Minimizes pentagon plus unitarity residuals from ``starts`` random unitary
    initial points.  Reports every run and the candidates below ``tol``; an
    empty candidate list is a legitimate outcome, not an error.
    """
    system = PentagonSystem(FusionSystem.two_label(trace))
    rng = np.random.default_rng(seed)
    m = system.n_unknowns

    def fun(v):
        x = v[:m] + 1j * v[m:]
        r = np.concatenate([system.residuals(x), system.unitarity(x)])
        return np.concatenate([r.real, r.imag])

    runs, candidates = [], []
    for _ in range(starts):
        init = {}
        for key, (_, n) in system.unknown.items():
            Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            Q, _ = np.linalg.qr(Z)
            init[key] = Q
        x0 = system.pack(init)
        sol = least_squares(fun, np.concatenate([x0.real, x0.imag]), max_nfev=max_nfev, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        res = float(np.max(np.abs(sol.fun))) if sol.fun.size else 0.0
        runs.append(res)
        if res <= tol:
            x = sol.x[:m] + 1j * sol.x[m:]
            candidates.append(
                {
                    "residual": res,
                    "blocks": {
                        "F^{%d%d%d}_%d" % key: operator_to_json(X) for key, X in system.unpack(x).items()
                    },
                }
            )
    return {
        "trace": trace,
        "unknowns": m,
        "equations": system.n_equations,
        "seed": seed,
        "starts": starts,
        "run_residuals": runs,
        "best_residual": min(runs) if runs else None,
        "candidates": candidates,
    }


# ---------------------------------------------------------------------------
# Braid group representation


def _block(d: FRData, a: int, c: int) -> np.ndarray:
    """Action on the middle label given outer labels ``a`` and ``c``.

    Returns a 2x2 matrix indexed by the middle label when both outer labels
    are the anyon, otherwise a 1x1 phase.
    """
    if a == 0:
        return np.array([[d.R[c]]])
    if c == 0:
        return np.array([[d.R[1]]])
    return np.linalg.inv(d.F) @ np.diag(d.R) @ d.F


def braid_generator(
    i: int, n: int, d: FRData, total_charge: Optional[int] = None
) -> np.ndarray:
    """Matrix of ``sigma_i`` (exchange of anyons ``i`` and ``i+1``) on the path basis."""
    if i < 1:
        raise ValueError("generator index must be positive")
    basis = enumerate_paths(FusionSystem.fibonacci(), max(n, 1), total_charge=total_charge)
    dim = len(basis.paths)
    if i > n - 1:
        return np.eye(dim, dtype=complex)
    M = np.zeros((dim, dim), dtype=complex)
    for col, path in enumerate(basis.paths):
        full = (0, 1) + path  # charges after 0, 1, 2, ... anyons
        a, b, c = full[i - 1], full[i], full[i + 1]
        block = _block(d, a, c)
        if block.shape == (1, 1):
            M[col, col] = block[0, 0]
            continue
        for b_new in (0, 1):
            new = list(path)
            new[i - 2] = b_new
            M[basis.index(new), col] += block[b_new, b]
    return M


@dataclass(frozen=True)
class BraidWord:
    """Sequence of ``(generator, exponent)`` pairs; generator indices are positive."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), int(e)) for g, e in self.letters)
        if any(g < 1 for g, _ in letters):
            raise ValueError("generator indices must be positive")
        object.__setattr__(self, "letters", letters)

    def normalize(self) -> "BraidWord":
        """Merge adjacent equal generators and drop zero exponents."""
        out: list[list[int]] = []
        for g, e in self.letters:
            if out and out[-1][0] == g:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            elif e:
                out.append([g, e])
        return BraidWord(tuple(map(tuple, out)))

    def commuting_normal_form(self) -> "BraidWord":
        """Sort far-commuting neighbours by index, merging as they meet."""
        letters = list(self.normalize().letters)
        changed = True
        while changed:
            changed = False
            for k in range(len(letters) - 1):
                (g, _), (h, _) = letters[k], letters[k + 1]
                if abs(g - h) >= 2 and g > h:
                    letters[k], letters[k + 1] = letters[k + 1], letters[k]
                    changed = True
            merged = BraidWord(tuple(letters)).normalize().letters
            if len(merged) != len(letters):
                changed = True
            letters = list(merged)
        return BraidWord(tuple(letters))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def exponents(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g, e in self.letters:
            out[g] = out.get(g, 0) + e
        return {g: e for g, e in sorted(out.items()) if e}

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=0)

    def to_json(self) -> list[dict]:
        return [{"gen": g, "exp": e} for g, e in self.letters]

    @classmethod
    def from_json(cls, obj: Iterable) -> "BraidWord":
        letters = []
        for item in obj:
            if isinstance(item, dict):
                letters.append((item["gen"], item.get("exp", 1)))
            else:
                g, e = item
                letters.append((g, e))
        return cls(tuple(letters))


def apply_braid_word(
    w: BraidWord, n: int, d: FRData, total_charge: Optional[int] = None
) -> np.ndarray:
    """Operator of ``w`` on ``n`` anyons, first letter acting last (left to right product)."""
    dim = len(enumerate_paths(FusionSystem.fibonacci(), max(n, 1), total_charge=total_charge).paths)
    out = np.eye(dim, dtype=complex)
    cache: dict[int, np.ndarray] = {}
    for g, e in w.letters:
        if g not in cache:
            cache[g] = braid_generator(g, n, d, total_charge)
        B = cache[g]
        out = out @ np.linalg.matrix_power(B if e >= 0 else B.conj().T, abs(e))
    return out


def conjugate_action(B: np.ndarray, M: np.ndarray) -> np.ndarray:
    """``B M B^{-1}``; ``B`` is unitary so the inverse is its adjoint."""
    return B @ M @ B.conj().T


def dimension_function_to_braid(
    f: DimensionFunction, L: int, enumeration: str = "vertex"
) -> BraidWord:
    """Word ``sigma_1^{v_0} sigma_3^{v_1} ... sigma_{2L+1}^{v_L}``.

    ``enumeration="vertex"`` takes ``v_j`` from the vertex list root, top, bottom,
    top, ...; ``"level"`` takes the top-row value at level ``j``.  Undefined
    vertices contribute exponent 0.
    """
    if enumeration == "vertex":
        values = f.vertex_values()
    elif enumeration == "level":
        values = f.top_row()
    else:
        raise ValueError(f"unknown enumeration {enumeration!r}")
    if L + 1 > len(values):
        raise ValueError(f"truncation level {L} exceeds the {len(values)} available values")
    letters = tuple((2 * j + 1, v or 0) for j, v in enumerate(values[: L + 1]))
    return BraidWord(letters).normalize()


# ---------------------------------------------------------------------------


def operator_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"shape": list(M.shape), "data": [[float(z.real), float(z.imag)] for z in M.reshape(-1)]}


def operator_from_json(obj: dict) -> np.ndarray:
    data = np.array([complex(re, im) for re, im in obj["data"]], dtype=complex)
    return data.reshape(obj["shape"])
