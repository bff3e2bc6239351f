"""Bratteli diagrams, ordered K0 of stationary systems and dimension functions.

Diagrams are finite truncations: ``level_sizes[0] == 1`` is the root and
``incidence[n]`` is the ``level_sizes[n] x level_sizes[n+1]`` edge-multiplicity
matrix.  Rank vectors follow ``r_{n+1} = incidence[n]^T r_n`` with ``r_0 = (1,)``.
All integer work uses Python ints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import sympy

from .errors import HypothesisViolated, NotInjective, NotPrimitive
from .quadratic import (
    CFExpansion,
    QuadExpr,
    QuadraticIrrational,
    UnimodularMatrix,
    fixes,
    is_square,
)

IntMatrix = tuple[tuple[int, ...], ...]


def _as_int_matrix(rows) -> IntMatrix:
    if isinstance(rows, UnimodularMatrix):
        rows = rows.rows
    return tuple(tuple(int(v) for v in row) for row in rows)


def int_matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if len(A[0]) != len(B):
        raise ValueError("shape mismatch")
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0])))
        for i in range(len(A))
    )


def _vec_times(v: Sequence[int], A: IntMatrix) -> tuple[int, ...]:
    return tuple(sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(A[0])))


def swap_conjugate(phi) -> IntMatrix:
    """``P phi P`` with ``P`` the 2x2 coordinate swap."""
    (a, b), (c, d) = _as_int_matrix(phi)
    return ((d, c), (b, a))


@dataclass(frozen=True)
class BratteliDiagram:
    level_sizes: tuple[int, ...]
    incidence: tuple[IntMatrix, ...]
    labels: Optional[tuple[tuple[str, ...], ...]] = field(default=None, compare=False)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.level_sizes)
        inc = tuple(_as_int_matrix(m) for m in self.incidence)
        object.__setattr__(self, "level_sizes", sizes)
        object.__setattr__(self, "incidence", inc)
        if not sizes or sizes[0] != 1:
            raise ValueError("level 0 must consist of a single root vertex")
        if any(s < 1 for s in sizes):
            raise ValueError("level sizes must be positive")
        if len(inc) != len(sizes) - 1:
            raise ValueError("need one incidence matrix per pair of adjacent levels")
        for n, m in enumerate(inc):
            if len(m) != sizes[n] or any(len(row) != sizes[n + 1] for row in m):
                raise ValueError(f"incidence[{n}] has the wrong shape")
            if any(v < 0 for row in m for v in row):
                raise ValueError(f"incidence[{n}] has a negative entry")
        if self.labels is not None:
            labels = tuple(tuple(level) for level in self.labels)
            if tuple(len(level) for level in labels) != sizes:
                raise ValueError("labels do not match level sizes")
            object.__setattr__(self, "labels", labels)

    @property
    def n_levels(self) -> int:
        return len(self.level_sizes)

    @classmethod
    def stationary(
        cls,
        phi,
        n_levels: int,
        root_row: Sequence[int],
        labels: Optional[Sequence[str]] = None,
    ) -> "BratteliDiagram":
        """Root joined to level 1 by ``root_row``, then ``phi`` at every step."""
        phi = _as_int_matrix(phi)
        if n_levels < 1:
            raise ValueError("n_levels must be >= 1")
        N = len(phi)
        sizes = (1,) + (N,) * (n_levels - 1)
        inc = []
        if n_levels > 1:
            inc.append((tuple(root_row),))
            inc.extend([phi] * (n_levels - 2))
        lab = None
        if labels is not None:
            lab = (("root",),) + (tuple(labels),) * (n_levels - 1)
        return cls(sizes, tuple(inc), lab)

    def rank_vectors(self) -> list[tuple[int, ...]]:
        ranks = [(1,)]
        for m in self.incidence:
            ranks.append(_vec_times(ranks[-1], m))
        return ranks

    def is_stationary(self, from_level: int = 1) -> bool:
        return len(set(self.incidence[from_level:])) <= 1

    def to_json(self) -> dict:
        return {
            "levels": list(self.level_sizes),
            "incidence": [[list(row) for row in m] for m in self.incidence],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BratteliDiagram":
        return cls(tuple(obj["levels"]), tuple(tuple(map(tuple, m)) for m in obj["incidence"]))

    def to_dot(self, name: str = "bratteli") -> str:
        """Graphviz source; vertices show ranks, edges show multiplicities."""
        ranks = self.rank_vectors()
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for n, size in enumerate(self.level_sizes):
            for i in range(size):
                label = str(ranks[n][i])
                if self.labels is not None:
                    label = f"{self.labels[n][i]}: {label}"
                lines.append(f'  v{n}_{i} [label="{label}"];')
        for n, m in enumerate(self.incidence):
            for i, row in enumerate(m):
                for j, k in enumerate(row):
                    if k == 1:
                        lines.append(f"  v{n}_{i} -> v{n + 1}_{j};")
                    elif k > 1:
                        lines.append(f'  v{n}_{i} -> v{n + 1}_{j} [label="{k}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


FIBONACCI_MATRIX: IntMatrix = ((1, 1), (1, 0))


def from_continued_fraction(
    cf: CFExpansion, n_levels: int, convention: str = "standard"
) -> BratteliDiagram:
    """AF diagram of the continued fraction ``[c_0; c_1, c_2, ...]``.

    The integer part ``c_0`` is not used.  With ``convention="standard"`` the
    step out of level ``n`` is ``[[c_{n+1}, 1], [1, 0]]`` and level ``n`` has
    ranks ``(q_n, q_{n-1})``, the convergent denominators.  ``"flipped"`` uses
    ``[[0, 1], [1, c_{n+1}]]`` and reverses the vertex order.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    if convention not in ("standard", "flipped"):
        raise ValueError(f"unknown convention {convention!r}")
    # the root is a vertex of a virtual level with ranks (q_0, q_{-1}) = (1, 0)
    root_index = 0 if convention == "standard" else 1
    inc = []
    for n in range(n_levels - 1):
        c = cf.digit(n + 1)
        step = ((c, 1), (1, 0)) if convention == "standard" else ((0, 1), (1, c))
        inc.append((step[root_index],) if n == 0 else step)
    sizes = (1,) + (2,) * (n_levels - 1)
    return BratteliDiagram(sizes, tuple(inc))


def fibonacci_diagram(n_levels: int, root: str = "vacuum") -> BratteliDiagram:
    """The Fibonacci fusion diagram with vertex order ``(x1, x0)``.

    ``root="vacuum"`` starts from ``x0`` so level ``n`` carries
    ``M_Fib(n) + M_Fib(n-1)`` and counts the fusion paths of ``n`` anyons.
    ``root="anyon"`` starts from a single ``x1`` joined to both vertices.
    """
    if root == "vacuum":
        row = (1, 0)
    elif root == "anyon":
        row = (1, 1)
    else:
        raise ValueError(f"unknown root {root!r}")
    return BratteliDiagram.stationary(FIBONACCI_MATRIX, n_levels, row, labels=("x1", "x0"))


def telescope(diagram: BratteliDiagram, cuts: Sequence[int]) -> BratteliDiagram:
    """Keep levels ``cuts`` (0 is prepended if missing) and multiply between them."""
    cuts = list(cuts)
    if not cuts or cuts[0] != 0:
        cuts = [0] + cuts
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ValueError("cuts must be strictly increasing")
    if cuts[-1] >= diagram.n_levels:
        raise ValueError(f"cut {cuts[-1]} is beyond the last level")
    inc = []
    for lo, hi in zip(cuts, cuts[1:]):
        m = diagram.incidence[lo]
        for k in range(lo + 1, hi):
            m = int_matmul(m, diagram.incidence[k])
        inc.append(m)
    labels = None
    if diagram.labels is not None:
        labels = tuple(diagram.labels[c] for c in cuts)
    return BratteliDiagram(tuple(diagram.level_sizes[c] for c in cuts), tuple(inc), labels)


def path_counts(diagram: BratteliDiagram, n: int) -> tuple[int, ...]:
    """Number of root-to-vertex paths, with multiplicity, at level ``n``."""
    if not 0 <= n < diagram.n_levels:
        raise ValueError(f"level {n} out of range")
    counts = (1,)
    for m in diagram.incidence[:n]:
        counts = _vec_times(counts, m)
    return counts


# ---------------------------------------------------------------------------
# ordered K0 of stationary 2x2 systems


def _is_primitive(phi: IntMatrix) -> bool:
    n = len(phi)
    power = phi
    for _ in range((n - 1) ** 2 + 1):  # Wielandt bound
        if all(v > 0 for row in power for v in row):
            return True
        power = int_matmul(power, phi)
    return False


def perron_eigenvalue(phi) -> QuadExpr:
    (a, b), (c, d) = _as_int_matrix(phi)
    t, det = a + d, a * d - b * c
    disc = t * t - 4 * det
    if is_square(disc):
        return QuadExpr(Fraction(t + math.isqrt(disc), 2))
    return QuadExpr(Fraction(t, 2), Fraction(1, 2), disc)


def perron_vector(phi, side: str = "right") -> tuple[QuadExpr, QuadExpr]:
    """Positive Perron eigenvector of a primitive 2x2 matrix, exact."""
    m = _as_int_matrix(phi)
    if side == "left":
        m = tuple(zip(*m))
    elif side != "right":
        raise ValueError(f"unknown side {side!r}")
    (a, b), (c, d) = m
    lam = perron_eigenvalue(m)
    # primitive 2x2 => b, c > 0
    return (lam - d) / c, QuadExpr(Fraction(1))


@dataclass(frozen=True)
class OrderedK0:
    """Z^2 with cone ``{0} U {h : <functional, h> > 0}``."""

    rank: int
    functional: tuple[QuadExpr, QuadExpr]
    order_unit: tuple[int, ...]
    convention: str = "right"

    def pairing(self, h: Sequence[int]) -> QuadExpr:
        return self.functional[0] * h[0] + self.functional[1] * h[1]

    def is_positive(self, h: Sequence[int]) -> bool:
        if all(v == 0 for v in h):
            return True
        return self.pairing(h).sign() > 0

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "functional": [v.to_json() for v in self.functional],
            "order_unit": list(self.order_unit),
            "convention": self.convention,
        }


def k0_stationary(phi, which_eigvec: str = "right", order_unit=(1, 1)) -> OrderedK0:
    """Dimension group of the stationary diagram with incidence ``phi``.

    The connecting maps are ``h -> phi^T h`` so the trace is the right Perron
    eigenvector (``which_eigvec="right"``); ``"left"`` is offered for the
    transposed convention.
    """
    m = _as_int_matrix(phi)
    if len(m) != 2 or any(len(r) != 2 for r in m):
        raise ValueError("exact ordered K0 is implemented for 2x2 matrices only")
    if any(v < 0 for row in m for v in row) or not _is_primitive(m):
        raise NotPrimitive(f"{[list(r) for r in m]} is not primitive")
    return OrderedK0(2, perron_vector(m, which_eigvec), tuple(order_unit), which_eigvec)


def _pair_parallel_positive(w, v) -> bool:
    cross = w[0] * v[1] - w[1] * v[0]
    return cross.sign() == 0 and (w[0] * v[0] + w[1] * v[1]).sign() > 0


def cone_compare(
    theta: QuadraticIrrational, g: UnimodularMatrix, bound: int = 3, grid: int = 10
) -> dict:
    """Compare the dimension groups of incidences ``g`` and ``[[Tr g, 1], [1, 0]]``.

    Searches ``M`` in GL2(Z) with entries in ``[-bound, bound]`` mapping the
    cone of ``g`` onto the cone of ``N1`` (``M^T v_N`` a positive multiple of
    ``v_g``), under two conventions for the ``N1`` functional: ``"display"``
    uses its own Perron vector ``(lam, 1)``, ``"swapped"`` uses ``(1, lam)``.
    Also counts disagreements of the raw predicates on an integer grid.
    """
    if not fixes(g, theta):
        raise HypothesisViolated(f"{g.tolist()} does not fix {theta}")
    if not g.is_nonnegative():
        raise HypothesisViolated(f"{g.tolist()} has a negative entry")
    if g.det != -1:
        raise HypothesisViolated(f"det {g.tolist()} = {g.det}, expected -1")
    lam = g.c * theta.value + g.d
    n1 = ((g.trace, 1), (1, 0))
    v_g = (theta.value, QuadExpr(Fraction(1)))
    functionals = {"display": (lam, QuadExpr(Fraction(1))), "swapped": (QuadExpr(Fraction(1)), lam)}
    k0_g = k0_stationary(g)
    same_g = _pair_parallel_positive(k0_g.functional, v_g)

    candidates = []
    rng = range(-bound, bound + 1)
    for a, b, c, d in itertools.product(rng, repeat=4):
        if a * d - b * c in (1, -1):
            candidates.append(UnimodularMatrix(a, b, c, d))

    report = {
        "theta": theta.to_json(),
        "g": g.tolist(),
        "N1": [list(r) for r in n1],
        "lambda": lam.to_json(),
        "lambda_float": float(lam),
        "g_functional_is_theta_1": same_g,
        "bound": bound,
        "conventions": {},
    }
    g_m = g.rows
    for name, v_n in functionals.items():
        isos = []
        for M in candidates:
            w = (M.a * v_n[0] + M.c * v_n[1], M.b * v_n[0] + M.d * v_n[1])  # M^T v_N
            if _pair_parallel_positive(w, v_g):
                isos.append(M)
        target = n1 if name == "display" else swap_conjugate(n1)
        intertwining = [M for M in isos if int_matmul(M.rows, g_m) == int_matmul(target, M.rows)]
        disagree = 0
        for n, m in itertools.product(range(-grid, grid + 1), repeat=2):
            pos_g = (theta.value * n + m).sign() >= 0
            pos_n = (v_n[0] * n + v_n[1] * m).sign() >= 0
            disagree += pos_g != pos_n
        report["conventions"][name] = {
            "functional": [x.to_json() for x in v_n],
            "found": bool(isos),
            "identity_is_isomorphism": any(M.is_identity() for M in isos),
            "isomorphisms": [M.tolist() for M in isos],
            "intertwining": [M.tolist() for M in intertwining],
            "grid_radius": grid,
            "grid_disagreements": disagree,
        }
    return report


# ---------------------------------------------------------------------------
# quasi-isomorphism type of the direct limit


@dataclass(frozen=True)
class QuasiSummand:
    min_poly: tuple[int, ...]  # monic, highest degree first
    degree: int
    multiplicity: int
    jordan_blocks: tuple[int, ...]
    norm: int
    is_unit: bool
    descriptor: str


@dataclass(frozen=True)
class K0QuasiType:
    dimension: int
    summands: tuple[QuasiSummand, ...]

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "summands": [
                {
                    "min_poly": list(s.min_poly),
                    "degree": s.degree,
                    "multiplicity": s.multiplicity,
                    "jordan_blocks": list(s.jordan_blocks),
                    "norm": s.norm,
                    "is_unit": s.is_unit,
                    "descriptor": s.descriptor,
                }
                for s in self.summands
            ],
        }


def _jordan_blocks(M: sympy.Matrix, p: sympy.Poly, mult: int) -> tuple[int, ...]:
    deg = p.degree()
    pm = sympy.zeros(*M.shape)
    for coeff in p.all_coeffs():
        pm = pm * M + coeff * sympy.eye(M.shape[0])
    kernel_dims = [0]
    power = sympy.eye(M.shape[0])
    for _ in range(mult):
        power = power * pm
        kernel_dims.append((M.shape[0] - power.rank()) // deg)
    at_least = [kernel_dims[s] - kernel_dims[s - 1] for s in range(1, len(kernel_dims))]
    at_least.append(0)
    blocks = []
    for s in range(1, len(at_least)):
        blocks += [s] * (at_least[s - 1] - at_least[s])
    return tuple(sorted(blocks, reverse=True))


def k0_quasi_type(phi) -> K0QuasiType:
    """Summands ``L_lam = O_lam[1/lam]`` of the limit of ``Z^N`` under ``phi``."""
    m = _as_int_matrix(phi)
    M = sympy.Matrix(m)
    if M.det() == 0:
        raise NotInjective(f"{[list(r) for r in m]} is singular")
    x = sympy.Symbol("x")
    _, factors = sympy.factor_list(M.charpoly(x).as_expr(), x)
    summands = []
    for f, mult in sorted(factors, key=lambda fm: sympy.Poly(fm[0], x).all_coeffs()):
        p = sympy.Poly(f, x)
        coeffs = tuple(int(c) for c in p.all_coeffs())
        deg = p.degree()
        norm = (-1) ** deg * coeffs[-1]
        unit = abs(norm) == 1
        if deg == 1:
            root = -coeffs[-1]
            descriptor = "Z" if unit else f"Z[1/{abs(root)}]"
        else:
            descriptor = "O_lam" if unit else "O_lam[1/lam]"
        summands.append(
            QuasiSummand(coeffs, deg, int(mult), _jordan_blocks(M, p, int(mult)), int(norm), unit, descriptor)
        )
    return K0QuasiType(len(m), tuple(summands))


# ---------------------------------------------------------------------------
# dimension functions on the multiplicity-one Fibonacci diagram


def satisfies_dimension_equation(
    diagram: BratteliDiagram, values: Sequence[Sequence[Optional[int]]]
) -> list[tuple[int, int, bool]]:
    """Check ``f(V) = sum_v f(v) kappa(v, V)`` at every vertex above the root.

    Vertices whose value or any predecessor's value is undefined are skipped.
    Returns ``(level, index, ok)`` for each checked vertex.
    """
    out = []
    for n, m in enumerate(diagram.incidence):
        below, above = values[n], values[n + 1]
        for j in range(diagram.level_sizes[n + 1]):
            preds = [i for i in range(diagram.level_sizes[n]) if m[i][j]]
            if above[j] is None or any(below[i] is None for i in preds):
                continue
            total = sum(below[i] * m[i][j] for i in preds)
            out.append((n + 1, j, total == above[j]))
    return out


def _check_fibonacci(diagram: BratteliDiagram) -> None:
    if diagram.n_levels < 2 or diagram.incidence[0] != ((1, 1),) or any(
        m != FIBONACCI_MATRIX for m in diagram.incidence[1:]
    ):
        raise HypothesisViolated("dimension functions are extended only on the anyon-rooted Fibonacci diagram")


@dataclass(frozen=True)
class DimensionFunction:
    """Values of an integer dimension function, ``None`` where undefined.

    ``values[0]`` is the root; ``values[k] = (top, bottom)`` for ``k >= 1``.
    """

    diagram: BratteliDiagram
    values: tuple[tuple[Optional[int], ...], ...]
    defined_from: int

    def vertex_values(self) -> list[Optional[int]]:
        """Values in the order ``v_0, v_1, v_2, ...`` (top before bottom)."""
        out = [self.values[0][0]]
        for top, bottom in self.values[1:]:
            out += [top, bottom]
        return out

    def top_row(self) -> list[Optional[int]]:
        return [self.values[0][0]] + [level[0] for level in self.values[1:]]

    def check(self) -> list[tuple[int, int, bool]]:
        return satisfies_dimension_equation(self.diagram, self.values)

    def __add__(self, other: "DimensionFunction") -> "DimensionFunction":
        if other.diagram != self.diagram:
            raise ValueError("dimension functions live on different diagrams")
        last = self.diagram.n_levels - 1
        top = self.values[last][0] + other.values[last][0]
        bottom = self.values[last][1] + other.values[last][1]
        return dimension_function_extend(self.diagram, last, (top, bottom))

    def to_json(self) -> dict:
        return {"values": [list(v) for v in self.values], "defined_from": self.defined_from}


def dimension_function_extend(
    diagram: BratteliDiagram, seed_level: int, seed: tuple[int, int]
) -> DimensionFunction:
    """Maximal integer dimension function through ``seed`` at ``seed_level``.

    Forward: ``top' = top + bottom``, ``bottom' = top``.  Backward: the
    previous level is ``(bottom, top - bottom)``, always integral, down to
    level 1.  The root is defined only when both level-1 values agree.
    """
    _check_fibonacci(diagram)
    if not 1 <= seed_level < diagram.n_levels:
        raise ValueError(f"seed level {seed_level} out of range 1..{diagram.n_levels - 1}")
    levels: dict[int, tuple[int, int]] = {seed_level: (int(seed[0]), int(seed[1]))}
    for k in range(seed_level + 1, diagram.n_levels):
        t, b = levels[k - 1]
        levels[k] = (t + b, t)
    for k in range(seed_level - 1, 0, -1):
        t, b = levels[k + 1]
        levels[k] = (b, t - b)
    t1, b1 = levels[1]
    root = t1 if t1 == b1 else None
    values = ((root,),) + tuple(levels[k] for k in range(1, diagram.n_levels))
    return DimensionFunction(diagram, values, 0 if root is not None else 1)


FIBONACCI_SEEDS = {"1": (1, 1), "1/tau": (2, 1), "tau": (3, 2)}


def fibonacci_dimension_function(kind: str, n_levels: int) -> DimensionFunction:
    """The generators ``f_1``, ``f_{1/tau}``, ``f_tau`` seeded at level 1."""
    return dimension_function_extend(fibonacci_diagram(n_levels, root="anyon"), 1, FIBONACCI_SEEDS[kind])
