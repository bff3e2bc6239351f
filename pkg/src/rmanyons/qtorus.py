"""Clock/shift gates, truncated Weyl series and quantum dilogarithms.

Fractional powers ``w**alpha`` always use the principal logarithm, whose cut is
the closed negative real axis.  Integer exponents never touch the cut.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Optional

import numpy as np

from .errors import BadParams, BranchCut, IllConditioned
from .quadratic import QuadraticIrrational, cf_expand

COMMUTATION_TOL = 1e-13
CUT_TOL = 1e-14


# ---------------------------------------------------------------------------
# Clock and shift


@dataclass(frozen=True, eq=False)
class ClockShiftPair:
    """``U = diag(xi^k)``, ``V`` the cyclic downshift ``e_k -> e_{k+1}``; ``UV = xi VU``."""

    p: int
    q: int
    U: np.ndarray
    V: np.ndarray

    @property
    def xi(self) -> complex:
        return cmath.exp(2j * math.pi * self.p / self.q)

    def commutation_residual(self) -> float:
        return float(np.linalg.norm(self.U @ self.V - self.xi * self.V @ self.U, 2))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "xi": [self.xi.real, self.xi.imag],
            "commutation_residual": self.commutation_residual(),
        }


def clock_shift(p: int, q: int) -> ClockShiftPair:
    if q < 1 or math.gcd(p, q) != 1:
        raise BadParams(f"need q >= 1 and gcd(p, q) = 1, got p={p}, q={q}")
    # reduce k*p mod q before exponentiating so large q keeps full accuracy
    U = np.diag([cmath.exp(2j * math.pi * ((k * p) % q) / q) for k in range(q)])
    V = np.roll(np.eye(q, dtype=complex), 1, axis=0)
    return ClockShiftPair(p, q, U, V)


def convergent_gates(theta: QuadraticIrrational, n: int) -> ClockShiftPair:
    """Gates for the ``n``-th convergent ``p/q`` of ``theta`` (``n = 1`` is the first)."""
    if n < 1:
        raise BadParams("convergent index starts at 1")
    p, q = cf_expand(theta).convergents(n)[n - 1]
    return clock_shift(p, q)


# ---------------------------------------------------------------------------
# Truncated Weyl series


@dataclass
class TruncatedWeylSeries:
    """Finite sum of ``c_ab U^a V^b`` with ``a + b <= max_degree``, where ``UV = q VU``."""

    q: Number
    max_degree: int
    coeffs: dict[tuple[int, int], Number] = field(default_factory=dict)

    @classmethod
    def monomial(cls, q, max_degree: int, a: int, b: int, c=1) -> "TruncatedWeylSeries":
        coeffs = {(a, b): c} if a + b <= max_degree else {}
        return cls(q, max_degree, coeffs)

    @classmethod
    def one(cls, q, max_degree: int) -> "TruncatedWeylSeries":
        return cls.monomial(q, max_degree, 0, 0, 1)

    def _like(self, coeffs) -> "TruncatedWeylSeries":
        return TruncatedWeylSeries(self.q, self.max_degree, coeffs)

    def __add__(self, other: "TruncatedWeylSeries") -> "TruncatedWeylSeries":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return self._like(out)

    def __neg__(self) -> "TruncatedWeylSeries":
        return self._like({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "TruncatedWeylSeries") -> "TruncatedWeylSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedWeylSeries") -> "TruncatedWeylSeries":
        # (U^a V^b)(U^c V^d) = q^{-bc} U^{a+c} V^{b+d}
        d = min(self.max_degree, other.max_degree)
        out: dict = {}
        for (a, b), x in self.coeffs.items():
            for (c, e), y in other.coeffs.items():
                if a + b + c + e > d:
                    continue
                key = (a + c, b + e)
                out[key] = out.get(key, 0) + x * y * self.q ** (-(b * c))
        return TruncatedWeylSeries(self.q, d, out)

    def max_abs_diff(self, other: "TruncatedWeylSeries") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self.coeffs.get(k, 0) - other.coeffs.get(k, 0)) for k in keys), default=0.0)


def _psi_coefficients(q, n_max: int) -> list:
    """Taylor coefficients of ``(x; q)_inf``: ``(-1)^n q^{n(n-1)/2} / (q; q)_n``."""
    out, poch = [], 1
    for n in range(n_max + 1):
        if n:
            poch *= 1 - q**n
        out.append((-1) ** n * q ** (n * (n - 1) // 2) / poch)
    return out


def psi_of_monomial(q, max_degree: int, a: int, b: int, scalar=1) -> TruncatedWeylSeries:
    """``Psi_q(X)`` for ``X = scalar * U^a V^b``, truncated at ``max_degree``.

    ``X^n = scalar^n q^{-ab n(n-1)/2} U^{na} V^{nb}``.
    """
    if a + b == 0:
        raise ValueError("argument must have positive degree")
    n_max = max_degree // (a + b)
    coeffs = {}
    for n, c in enumerate(_psi_coefficients(q, n_max)):
        coeffs[(n * a, n * b)] = c * scalar**n * q ** (-(a * b) * (n * (n - 1) // 2))
    return TruncatedWeylSeries(q, max_degree, coeffs)


def _as_exact(q):
    if isinstance(q, Fraction):
        return q
    if isinstance(q, complex) and q.imag == 0:
        q = q.real
    if isinstance(q, (int, float)):
        return Fraction(str(q))
    raise BadParams("exact arithmetic needs a rational q")


def weyl_pentagon_sides(
    q, degree: int, drop_middle: bool = False, exact: bool = False
) -> tuple[TruncatedWeylSeries, TruncatedWeylSeries]:
    if abs(q) >= 1:
        raise BadParams("need |q| < 1")
    if not 0 <= degree <= 12:
        raise BadParams("degree must lie in 0..12")
    q = _as_exact(q) if exact else complex(q)
    if degree == 0:
        one = TruncatedWeylSeries.one(q, 0)
        return one, one
    psi_u = psi_of_monomial(q, degree, 1, 0)
    psi_v = psi_of_monomial(q, degree, 0, 1)
    # -VU = -q^{-1} UV
    psi_mid = psi_of_monomial(q, degree, 1, 1, -1 / q)
    lhs = psi_v * psi_u
    rhs = psi_u * psi_v if drop_middle else psi_u * psi_mid * psi_v
    return lhs, rhs


def weyl_pentagon_check(q, degree: int, drop_middle: bool = False, exact: bool = False) -> float:
    """Max coefficient residual of ``Psi(V) Psi(U) = Psi(U) Psi(-VU) Psi(V)``."""
    lhs, rhs = weyl_pentagon_sides(q, degree, drop_middle, exact)
    return float(lhs.max_abs_diff(rhs))


# ---------------------------------------------------------------------------
# Quantum dilogarithm at roots of unity


def principal_power(w: complex, alpha, log: Optional[list] = None, where: str = "") -> complex:
    """``w**alpha`` on the principal branch; raises BranchCut on the cut."""
    w = complex(w)
    alpha_f = float(alpha)
    if alpha_f == int(alpha_f) and (alpha_f >= 0 or w != 0):
        value = w ** int(alpha_f)
        on_cut = False
    else:
        on_cut = abs(w.imag) <= CUT_TOL * max(1.0, abs(w)) and w.real <= 0
        value = None if on_cut else cmath.exp(alpha_f * cmath.log(w))
    if log is not None:
        log.append(
            {
                "where": where,
                "base": [w.real, w.imag],
                "exponent": str(alpha),
                "arg": cmath.phase(w) if w else 0.0,
                "on_cut": on_cut,
            }
        )
    if on_cut:
        raise BranchCut(f"{where or 'base'} {w} lies on the principal cut (exponent {alpha})")
    return value


def _check_root(zeta: complex, N: int) -> None:
    if N < 1:
        raise BadParams("order must be positive")
    if abs(zeta**N - 1) > 1e-9 or any(abs(zeta**k - 1) < 1e-9 for k in range(1, N)):
        raise BadParams(f"{zeta} is not a primitive {N}-th root of unity")


def qdilog_root_of_unity(zeta: complex, N: int, z: complex, log: Optional[list] = None) -> complex:
    """``(1 - z^N)^{(N-1)/2N} * prod_k (1 - zeta^k z)^{-k/N}``."""
    _check_root(zeta, N)
    z = complex(z)
    value = principal_power(1 - z**N, Fraction(N - 1, 2 * N), log, "1-z^N")
    for k in range(1, N):
        value *= principal_power(1 - zeta**k * z, Fraction(-k, N), log, f"1-zeta^{k} z")
    return value


def qdilog_matrix(
    zeta: complex,
    N: int,
    A: np.ndarray,
    log: Optional[list] = None,
    cond_limit: float = 1e8,
    tol: float = 1e-10,
) -> np.ndarray:
    """Functional calculus ``Phi_zeta(A)`` through an eigendecomposition."""
    A = np.asarray(A, dtype=complex)
    w, X = np.linalg.eig(A)
    if np.linalg.cond(X) > cond_limit:
        raise IllConditioned(f"eigenbasis condition number {np.linalg.cond(X):.2e}")
    Xinv = np.linalg.inv(X)
    recon = float(np.linalg.norm(X @ np.diag(w) @ Xinv - A, 2))
    if recon > tol * max(1.0, float(np.linalg.norm(A, 2))):
        raise IllConditioned(f"reconstruction residual {recon:.2e}")
    values = [qdilog_root_of_unity(zeta, N, x, log) for x in w]
    return X @ np.diag(values) @ Xinv


def dilog_pentagon_residual(p: int, q: int, u: complex, v: complex) -> dict:
    """Evaluate both sides of the root-of-unity pentagon for ``u U``, ``v V``.

    A diagnostic: the residual is reported, never compared with a tolerance.
    """
    u, v = complex(u), complex(v)
    for name, x in (("u", u), ("v", v)):
        if abs(abs(x) - 1) > 1e-12:
            raise BadParams(f"{name} must have modulus 1")
        if abs(x**q - 1) < 1e-12:
            raise BadParams(f"{name}^q = 1")
    if abs(1 - u**q - v**q) < 1e-12:
        raise BadParams("1 - u^q - v^q = 0")
    gates = clock_shift(p, q)
    zeta, U, V = gates.xi, gates.U, gates.V
    log: list = []
    inv_q = Fraction(1, q)
    a = u / principal_power(1 - v**q, inv_q, log, "(1-v^q)^(1/q)")
    b = -u * v / principal_power(1 - u**q - v**q, inv_q, log, "(1-u^q-v^q)^(1/q)")
    c = v / principal_power(1 - u**q, inv_q, log, "(1-u^q)^(1/q)")

    def phi(M, label):
        sub: list = []
        out = qdilog_matrix(zeta, q, M, sub)
        for entry in sub:
            entry["where"] = f"{label}: {entry['where']}"
        log.extend(sub)
        return out

    lhs = phi(v * V, "Phi(vV)") @ phi(u * U, "Phi(uU)")
    rhs = phi(a * U, "Phi(aU)") @ phi(b * U @ V, "Phi(bUV)") @ phi(c * V, "Phi(cV)")
    return {
        "p": p,
        "q": q,
        "u": [u.real, u.imag],
        "v": [v.real, v.imag],
        "prefactors": {k: [x.real, x.imag] for k, x in (("a", a), ("b", b), ("c", c))},
        "residual": float(np.linalg.norm(lhs - rhs, 2)),
        "lhs_norm": float(np.linalg.norm(lhs, 2)),
        "branch_log": log,
    }


def sample_unit_pairs(count: int, seed: int) -> list[tuple[complex, complex]]:
    """Deterministic ``(u, v)`` pairs on the unit circle."""
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0, 2 * math.pi, size=(count, 2))
    return [(cmath.exp(1j * s), cmath.exp(1j * t)) for s, t in angles]
