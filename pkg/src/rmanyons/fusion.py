"""Fusion systems, their spectra, and the real-multiplication anyon construction.

Fusion tensors are indexed ``N[i][j][k] = N^k_{ij}``, so the fusion matrix of
label ``i`` is ``(N_i)_{jk} = N^k_{ij}`` in label order ``x_0, x_1, ...``.  For
the two-label systems built from a quadratic irrationality this matrix is
``[[0, 1], [1, Tr g]]``; the display form ``[[Tr g, 1], [1, 0]]`` is its
conjugate by the coordinate swap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NoAdmissibleMatrix, NoCommonBasis, NotDecomposable
from .quadratic import (
    QuadExpr,
    QuadraticIrrational,
    UnimodularMatrix,
    eigen_quad,
    fixes,
    fixing_matrices,
)

SPECTRAL_TOL = 1e-10
UNITARY_TOL = 1e-12

Tensor = tuple[tuple[tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class FusionSystem:
    labels: tuple[str, ...]
    dual: tuple[int, ...]
    N: Tensor

    def __post_init__(self):
        n = len(self.labels)
        N = tuple(tuple(tuple(int(v) for v in row) for row in mat) for mat in self.N)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "dual", tuple(int(i) for i in self.dual))
        object.__setattr__(self, "N", N)
        if len(self.dual) != n or len(N) != n or any(len(m) != n or any(len(r) != n for r in m) for m in N):
            raise ValueError("labels, dual and N must all have the same size")
        if any(v < 0 for m in N for r in m for v in r):
            raise ValueError("fusion coefficients must be nonnegative")
        if any(not 0 <= i < n for i in self.dual):
            raise ValueError("dual indices out of range")

    @property
    def rank(self) -> int:
        return len(self.labels)

    def matrix(self, i: int) -> np.ndarray:
        return np.array(self.N[i], dtype=float)

    def matrices(self) -> list[np.ndarray]:
        return [self.matrix(i) for i in range(self.rank)]

    def quantum_dimensions(self) -> np.ndarray:
        """Perron-Frobenius eigenvalue of each fusion matrix."""
        return np.array([max(np.linalg.eigvals(m).real) for m in self.matrices()])

    def total_dimension(self) -> float:
        return float(np.sqrt(np.sum(self.quantum_dimensions() ** 2)))

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "dual": list(self.dual),
            "N": [[list(r) for r in m] for m in self.N],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FusionSystem":
        return cls(tuple(obj["labels"]), tuple(obj["dual"]), obj["N"])

    @classmethod
    def trivial(cls) -> "FusionSystem":
        return cls(("x0",), (0,), (((1,),),))

    @classmethod
    def two_label(cls, trace: int) -> "FusionSystem":
        """``x1 x1 = trace*x1 + x0``; ``trace == 1`` is the Fibonacci system."""
        if trace < 0:
            raise ValueError("trace must be nonnegative")
        return cls(("x0", "x1"), (0, 1), (((1, 0), (0, 1)), ((0, 1), (1, trace))))

    @classmethod
    def fibonacci(cls) -> "FusionSystem":
        return cls.two_label(1)


@dataclass
class AxiomReport:
    checks: list[tuple[str, bool, list]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "checks": [{"name": n, "pass": ok, "violations": v[:20]} for n, ok, v in self.checks],
        }


def verify_axioms(F: FusionSystem) -> AxiomReport:
    """Check the unit, duality, symmetry and associativity identities."""
    n, N, dual = F.rank, F.N, F.dual
    idx = range(n)
    report = AxiomReport()

    def add(name, violations):
        report.checks.append((name, not violations, violations))

    add("dual_involution", [i for i in idx if dual[dual[i]] != i] + ([0] if dual[0] != 0 else []))
    add(
        "vacuum_unit",
        [(j, k) for j in idx for k in idx if N[0][j][k] != (j == k) or N[j][0][k] != (j == k)],
    )
    add("vacuum_duality", [(i, j) for i in idx for j in idx if N[i][j][0] != (j == dual[i])])
    triples = list(itertools.product(idx, repeat=3))
    add("commutativity", [(i, j, k) for i, j, k in triples if N[i][j][k] != N[j][i][k]])
    add("frobenius_duality", [(i, j, k) for i, j, k in triples if N[i][j][k] != N[i][dual[k]][dual[j]]])
    add("conjugation", [(i, j, k) for i, j, k in triples if N[i][j][k] != N[dual[i]][dual[j]][dual[k]]])
    add(
        "dual_transpose",
        [(i, j, k) for i, j, k in triples if N[dual[i]][j][k] != N[i][k][j]],
    )
    assoc = []
    for i, j, k, l in itertools.product(idx, repeat=4):
        left = sum(N[i][j][m] * N[m][k][l] for m in idx)
        right = sum(N[j][k][m] * N[i][m][l] for m in idx)
        if left != right:
            assoc.append((i, j, k, l))
    add("associativity", assoc)
    return report


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray  # eigenvalues[i, j] = lambda_{ij}
    S: np.ndarray
    residual: float

    def Lambda(self, i: int) -> np.ndarray:
        return np.diag(self.eigenvalues[i])


def _column_key(values: np.ndarray) -> tuple:
    return tuple(-round(float(v.real), 9) for v in values[1:]) + tuple(
        -round(float(v.imag), 9) for v in values[1:]
    )


def simultaneous_eigen(F: FusionSystem, tol: float = SPECTRAL_TOL) -> SpectralData:
    """Common unitary eigenbasis ``S`` with ``N_i = S Lambda_i S^dagger``.

    Columns are ordered by descending real part of the eigenvalues of
    ``N_1, N_2, ...`` (so the Perron column comes first) and phased so their
    leading nonzero entry is real positive.
    """
    mats = [m.astype(complex) for m in F.matrices()]
    for i, a in enumerate(mats):
        if np.linalg.norm(a @ a.conj().T - a.conj().T @ a) > tol:
            raise NoCommonBasis(f"N_{i} is not normal")
        for j, b in enumerate(mats[:i]):
            if np.linalg.norm(a @ b - b @ a) > tol:
                raise NoCommonBasis(f"N_{i} and N_{j} do not commute")
    rng = np.random.default_rng(20240917)
    for _ in range(8):
        weights = rng.uniform(0.5, 1.5, size=(len(mats), 2))
        H = sum(w0 * (a + a.conj().T) + 1j * w1 * (a - a.conj().T) for a, (w0, w1) in zip(mats, weights))
        _, S = np.linalg.eigh(H)
        lam = np.array([np.diag(S.conj().T @ a @ S) for a in mats])
        residual = max(np.linalg.norm(a - S @ np.diag(l) @ S.conj().T, 2) for a, l in zip(mats, lam))
        if residual <= tol:
            break
    else:
        raise NoCommonBasis(f"no common eigenbasis found (residual {residual:.2e})")
    order = sorted(range(S.shape[1]), key=lambda c: _column_key(lam[:, c]))
    S, lam = S[:, order], lam[:, order]
    for c in range(S.shape[1]):
        lead = next(v for v in S[:, c] if abs(v) > 1e-8)
        S[:, c] *= abs(lead) / lead
    if np.allclose(lam.imag, 0, atol=tol):
        lam = lam.real.astype(complex)
    if np.allclose(S.imag, 0, atol=tol):
        S = S.real.astype(complex)
    return SpectralData(lam, S, float(residual))


def verlinde_check(F: FusionSystem, spectral: SpectralData | None = None) -> float:
    """Max over ``a, b, j`` of ``|lam_aj lam_bj - sum_c N^c_ab lam_cj|``."""
    if spectral is None:
        spectral = simultaneous_eigen(F)
    lam = spectral.eigenvalues
    N = np.array(F.N, dtype=float)
    worst = 0.0
    for a, b in itertools.product(range(F.rank), repeat=2):
        lhs = lam[a] * lam[b]
        rhs = N[a, b] @ lam
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def fusion_ring_multiply(u: Sequence[int], v: Sequence[int], F: FusionSystem) -> tuple[int, ...]:
    """Product in the fusion ring of ``sum u_i x_i`` and ``sum v_j x_j``."""
    if len(u) != F.rank or len(v) != F.rank:
        raise ValueError("vector length must equal the number of labels")
    out = [0] * F.rank
    for i, j in itertools.product(range(F.rank), repeat=2):
        if u[i] and v[j]:
            c = u[i] * v[j]
            for k in range(F.rank):
                out[k] += c * F.N[i][j][k]
    return tuple(out)


# ---------------------------------------------------------------------------
# K0 bookkeeping for the real-multiplication construction


@dataclass(frozen=True)
class K0Class:
    """The element ``n + m*theta`` of ``Z + Z*theta``."""

    n: int
    m: int
    theta: QuadraticIrrational

    @property
    def value(self) -> QuadExpr:
        return self.n + self.m * self.theta.value

    @classmethod
    def from_value(cls, value: QuadExpr, theta: QuadraticIrrational) -> "K0Class":
        t = theta.value
        m = Fraction(value.y) / t.y if not value.is_rational else Fraction(0)
        if not value.is_rational and value.d != t.d:
            raise ValueError(f"{value} is not in Q(sqrt({t.d}))")
        n = value.x - m * t.x
        if m.denominator != 1 or n.denominator != 1:
            raise ValueError(f"{value} is not in Z + Z*theta")
        return cls(int(n), int(m), theta)

    def __add__(self, other: "K0Class") -> "K0Class":
        self._same(other)
        return K0Class(self.n + other.n, self.m + other.m, self.theta)

    def __sub__(self, other: "K0Class") -> "K0Class":
        self._same(other)
        return K0Class(self.n - other.n, self.m - other.m, self.theta)

    def __mul__(self, other: "K0Class") -> "K0Class":
        self._same(other)
        return K0Class.from_value(self.value * other.value, self.theta)

    def scale(self, k: int) -> "K0Class":
        return K0Class(k * self.n, k * self.m, self.theta)

    def _same(self, other: "K0Class") -> None:
        if other.theta != self.theta:
            raise ValueError("classes over different moduli")

    def sign(self) -> int:
        return self.value.sign()

    def __float__(self) -> float:
        return float(self.value)

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "theta": self.theta.to_json(), "value": float(self)}


def k0_class_of_power(g: UnimodularMatrix, theta: QuadraticIrrational, k: int) -> K0Class:
    """``[E_{g^k}] = c_k*theta + d_k`` from the bottom row of ``g^k``."""
    if not fixes(g, theta):
        raise ValueError(f"{g.tolist()} does not fix {theta}")
    gk = g**k
    return K0Class(gk.d, gk.c, theta)


def decompose_nonneg(x: K0Class, g: UnimodularMatrix, theta: QuadraticIrrational) -> tuple[int, int]:
    """Solve ``x = a*[E_g] + b*[1]`` with integers ``a, b >= 0``."""
    if g.c == 0:
        raise NotDecomposable("[E_g] is rational, so the basis {[E_g], [1]} is degenerate")
    if x.theta != theta:
        raise ValueError("class and modulus disagree")
    # n + m*theta = a*(c*theta + d) + b, and theta is irrational
    a, rem = divmod(x.m, g.c)
    if rem:
        raise NotDecomposable(f"m = {x.m} is not a multiple of c = {g.c}")
    b = x.n - a * g.d
    if a < 0 or b < 0:
        raise NotDecomposable(f"coefficients ({a}, {b}) are not both nonnegative")
    return a, b


@dataclass(frozen=True)
class FMatrixHomType:
    exponent: int
    multiplicity: int
    module_class: K0Class


def f_matrix_hom_type(
    i: int, j: int, k: int, u: int, g: UnimodularMatrix, theta: QuadraticIrrational
) -> FMatrixHomType:
    """``F^{ijk}_u`` acts on ``E_h + E_h`` with ``h = g^e``, ``e = #upper 1s - #lower 1s``."""
    if any(v not in (0, 1) for v in (i, j, k, u)):
        raise ValueError("labels must be 0 or 1")
    e = (i + j + k) - u
    return FMatrixHomType(e, 2, k0_class_of_power(g, theta, e))


def f_matrix_size(F: FusionSystem, i: int, j: int, k: int, u: int) -> int:
    """Dimension of ``Hom(x_u, (x_i x_j) x_k)``, the size of ``F^{ijk}_u``."""
    left = sum(F.N[i][j][e] * F.N[e][k][u] for e in range(F.rank))
    right = sum(F.N[i][d][u] * F.N[j][k][d] for d in range(F.rank))
    if left != right:
        raise ValueError("fusion rules are not associative")
    return left


def s_tilde(lam: float) -> np.ndarray:
    return np.array([[1.0, lam], [lam, -1.0]]) / math.sqrt(1.0 + lam * lam)


SWAP_FLOAT = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class RMAnyonSystem:
    theta: QuadraticIrrational
    g: UnimodularMatrix
    fusion: FusionSystem
    lam: QuadExpr
    S: np.ndarray = field(compare=False)
    x1_class: K0Class
    checks: dict = field(compare=False, default_factory=dict)

    @property
    def trace(self) -> int:
        return self.g.trace

    @property
    def n1_display(self) -> list[list[int]]:
        return [[self.trace, 1], [1, 0]]

    def to_json(self) -> dict:
        return {
            "theta": self.theta.to_json(),
            "g": self.g.tolist(),
            "trace": self.trace,
            "N1": self.n1_display,
            "N1_label_order": [list(r) for r in self.fusion.N[1]],
            "lambda": self.lam.to_json(),
            "S_tilde": self.S.tolist(),
            "x1_class": self.x1_class.to_json(),
            "checks": self.checks,
        }


def check_s_tilde(S: np.ndarray, trace: int, eigenvalues: Sequence[float]) -> dict:
    n1 = np.array([[trace, 1.0], [1.0, 0.0]])
    swapped = SWAP_FLOAT @ n1 @ SWAP_FLOAT
    return {
        "symmetry": float(np.max(np.abs(S - S.T))),
        "involution": float(np.linalg.norm(S @ S - np.eye(2), 2)),
        "swap_eigen_residual": float(np.linalg.norm(swapped @ S - S @ np.diag(eigenvalues), 2)),
    }


def rm_anyon_system(theta: QuadraticIrrational, max_periods: int = 4) -> RMAnyonSystem:
    """Two-label anyon system from a fixing matrix with ``det -1``, entries >= 0."""
    g = None
    for cand in fixing_matrices(theta, max_periods):
        if cand.det == -1 and cand.is_nonnegative() and (cand.c * theta.value + cand.d).sign() > 0:
            g = cand
            break
    if g is None:
        raise NoAdmissibleMatrix(f"no fixing matrix of {theta} has det -1 and nonnegative entries")
    lam = g.c * theta.value + g.d
    S = s_tilde(float(lam))
    fusion = FusionSystem.two_label(g.trace)
    eig = [float(v) for v in eigen_quad(g)]
    checks = check_s_tilde(S, g.trace, eig)
    return RMAnyonSystem(theta, g, fusion, lam, S, K0Class(g.d, g.c, theta), checks)
