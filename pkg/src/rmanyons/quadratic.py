"""Exact arithmetic in real quadratic fields.

Elements ``x + y*sqrt(d)`` are held as :class:`QuadExpr` with rational
coordinates; moduli ``(P + sqrt(D))/Q`` as :class:`QuadraticIrrational` in the
classical continued-fraction normal form ``Q | D - P**2``.  Everything here is
exact and uses Python integers, so convergent denominators never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Union

import sympy

from .errors import NotReduced

Rational = Union[int, Fraction]


@lru_cache(maxsize=4096)
def _squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` squarefree."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, f = 1, 1
    for prime, exp in sympy.factorint(n).items():
        s *= prime ** (exp // 2)
        if exp % 2:
            f *= prime
    return s, f


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True, eq=False)
class QuadExpr:
    """The number ``x + y*sqrt(d)`` with rational ``x, y`` and squarefree ``d``.

    Rational values are normalised to ``y == 0, d == 1`` and combine with any
    field; two irrational values combine only when their ``d`` agree.
    """

    x: Fraction
    y: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        x, y, d = Fraction(self.x), Fraction(self.y), int(self.d)
        if d < 1:
            raise ValueError(f"d must be a positive integer, got {d}")
        s, f = _squarefree_split(d)
        y *= s
        if f == 1:
            x, y = x + y, Fraction(0)
        if y == 0:
            f = 1
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "d", f)

    @staticmethod
    def coerce(value) -> "QuadExpr":
        if isinstance(value, QuadExpr):
            return value
        if isinstance(value, (int, Fraction)):
            return QuadExpr(Fraction(value))
        raise TypeError(f"cannot coerce {type(value).__name__} to QuadExpr")

    def __eq__(self, other):
        try:
            o = QuadExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.x, self.y, self.d) == (o.x, o.y, o.d)

    def __hash__(self):
        return hash((self.x, self.y, self.d)) if self.y else hash(self.x)

    def _field(self, other: "QuadExpr") -> int:
        if self.y == 0:
            return other.d
        if other.y == 0 or other.d == self.d:
            return self.d
        raise ValueError(f"incompatible fields Q(sqrt({self.d})) and Q(sqrt({other.d}))")

    @property
    def is_rational(self) -> bool:
        return self.y == 0

    def conjugate(self) -> "QuadExpr":
        return QuadExpr(self.x, -self.y, self.d)

    def norm(self) -> Fraction:
        return self.x * self.x - self.d * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def __add__(self, other):
        try:
            o = QuadExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadExpr(self.x + o.x, self.y + o.y, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadExpr(-self.x, -self.y, self.d)

    def __sub__(self, other):
        try:
            o = QuadExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return QuadExpr.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QuadExpr.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._field(o)
        return QuadExpr(self.x * o.x + d * self.y * o.y, self.x * o.y + self.y * o.x, d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadExpr":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadExpr division by zero")
        return QuadExpr(self.x / n, -self.y / n, self.d)

    def __truediv__(self, other):
        try:
            o = QuadExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return QuadExpr.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "QuadExpr":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QuadExpr(Fraction(1)), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sign(self) -> int:
        """Exact sign of the real number."""
        sx = (self.x > 0) - (self.x < 0)
        sy = (self.y > 0) - (self.y < 0)
        if sy == 0 or sx == sy:
            return sx or sy
        if sx == 0:
            return sy
        # opposite signs: compare x^2 with d*y^2
        cmp = self.x * self.x - self.d * self.y * self.y
        return sx if cmp > 0 else sy

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def floor(self) -> int:
        if self.y == 0:
            return math.floor(self.x)
        # x + y*sqrt(d) = (a + sgn*sqrt(b)) / m with integers, m > 0
        m = math.lcm(self.x.denominator, self.y.denominator)
        a = int(self.x * m)
        ym = self.y * m
        b = int(ym * ym * self.d)
        r = math.isqrt(b)  # sqrt(b) irrational here, so r < sqrt(b) < r + 1
        if ym > 0:
            return (a + r) // m
        return -((-a + r) // m) - 1

    def __float__(self) -> float:
        return float(self.x) + float(self.y) * math.sqrt(self.d)

    def to_mpf(self):
        import mpmath

        return mpmath.mpf(self.x.numerator) / self.x.denominator + (
            mpmath.mpf(self.y.numerator) / self.y.denominator
        ) * mpmath.sqrt(self.d)

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        return f"{self.x} + {self.y}*sqrt({self.d})"

    def to_json(self) -> dict:
        return {"x": str(self.x), "y": str(self.y), "d": self.d}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadExpr":
        return cls(Fraction(obj["x"]), Fraction(obj.get("y", "0")), int(obj.get("d", 1)))


def _canonical_pqd(value: QuadExpr) -> tuple[int, int, int]:
    """Smallest ``|Q|`` with ``value == (P + sqrt(D))/Q`` and ``Q | D - P^2``."""
    x, y, d = value.x, value.y, value.d
    sign = 1 if y > 0 else -1
    step = x.denominator
    disc = y * y * d - x * x
    bound = math.lcm(x.denominator, y.denominator) * disc.denominator
    for absq in range(step, bound + step, step):
        yq = y * absq
        big_d = yq * yq * d
        if big_d.denominator != 1:
            continue
        q = sign * absq
        p = x * q
        big_d = int(big_d)
        if (big_d - int(p) ** 2) % q == 0:
            return int(p), q, big_d
    raise AssertionError("unreachable: bound always admits a normal form")


@dataclass(frozen=True)
class QuadraticIrrational:
    """The irrational number ``(P + sqrt(D))/Q``, stored in canonical form.

    Construction rescales ``(P, Q, D)`` to the smallest ``|Q|`` with
    ``Q | D - P^2``, so equal values have equal fields.
    """

    P: int
    Q: int
    D: int

    def __post_init__(self):
        P, Q, D = int(self.P), int(self.Q), int(self.D)
        if Q == 0:
            raise ValueError("Q must be nonzero")
        if D <= 0 or is_square(D):
            raise ValueError(f"D must be a positive nonsquare, got {D}")
        P, Q, D = _canonical_pqd(QuadExpr(Fraction(P, Q), Fraction(1, Q), D))
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "D", D)

    @classmethod
    def from_quad(cls, value: QuadExpr) -> "QuadraticIrrational":
        if value.is_rational:
            raise ValueError(f"{value} is rational")
        return cls(*_canonical_pqd(value))

    @property
    def value(self) -> QuadExpr:
        return QuadExpr(Fraction(self.P, self.Q), Fraction(1, self.Q), self.D)

    def conjugate(self) -> QuadExpr:
        return self.value.conjugate()

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"({self.P} + sqrt({self.D}))/{self.Q}"

    def to_json(self) -> dict:
        return {"P": self.P, "Q": self.Q, "D": self.D}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadraticIrrational":
        return cls(int(obj["P"]), int(obj["Q"]), int(obj["D"]))


GOLDEN = QuadraticIrrational(1, 2, 5)
SILVER = QuadraticIrrational(1, 1, 2)


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer 2x2 matrix ``[[a, b], [c, d]]`` with determinant +1 or -1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.det not in (1, -1):
            raise ValueError(f"determinant {self.det} is not +-1 for {self.rows}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "UnimodularMatrix":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def tolist(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def is_nonnegative(self) -> bool:
        return min(self.a, self.b, self.c, self.d) >= 0

    def is_identity(self) -> bool:
        return self.rows == ((1, 0), (0, 1))

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        e = self.det  # 1/det == det for det = +-1
        return UnimodularMatrix(e * self.d, -e * self.b, -e * self.c, e * self.a)

    def transpose(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.a, self.c, self.b, self.d)

    def __pow__(self, k: int) -> "UnimodularMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = UnimodularMatrix.identity(), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __str__(self) -> str:
        return str(self.tolist())

    def to_json(self) -> list[list[int]]:
        return self.tolist()


SWAP = UnimodularMatrix(0, 1, 1, 0)


def digit_matrix(c: int) -> UnimodularMatrix:
    """``[[c, 1], [1, 0]]``: the Moebius map ``x -> c + 1/x``."""
    return UnimodularMatrix(c, 1, 1, 0)


def reduced_generator(k: int) -> UnimodularMatrix:
    return UnimodularMatrix(0, 1, 1, k)


def matrix_product(mats: Sequence[UnimodularMatrix]) -> UnimodularMatrix:
    result = UnimodularMatrix.identity()
    for m in mats:
        result = result @ m
    return result


@dataclass(frozen=True)
class CFExpansion:
    """Eventually periodic continued fraction ``[preperiod; period, period, ...]``."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(c) for c in self.preperiod))
        object.__setattr__(self, "period", tuple(int(c) for c in self.period))
        if not self.period:
            raise ValueError("period must be nonempty")
        tail = self.preperiod[1:] + self.period
        if any(c <= 0 for c in tail):
            raise ValueError("digits after the first must be positive")

    def digit(self, k: int) -> int:
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.period[(k - len(self.preperiod)) % len(self.period)]

    def digits(self, n: int) -> list[int]:
        return [self.digit(k) for k in range(n)]

    def convergents(self, n: int) -> list[tuple[int, int]]:
        """First ``n`` convergents ``p_k/q_k``, k = 0..n-1, as integer pairs."""
        p_prev, p = 0, 1
        q_prev, q = 1, 0
        out = []
        for c in self.digits(n):
            p_prev, p = p, c * p + p_prev
            q_prev, q = q, c * q + q_prev
            out.append((p, q))
        return out

    def value(self) -> QuadraticIrrational:
        """Reconstruct the number from its digits, exactly."""
        m = matrix_product([digit_matrix(c) for c in self.period])
        # purely periodic tail y > 1 solves c*y^2 + (d - a)*y - b = 0
        disc = (m.a - m.d) ** 2 + 4 * m.b * m.c
        tail = QuadExpr(Fraction(m.a - m.d, 2 * m.c), Fraction(1, 2 * m.c), disc)
        head = matrix_product([digit_matrix(c) for c in self.preperiod])
        return QuadraticIrrational.from_quad(_act(head, tail))

    def to_json(self) -> dict:
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    @classmethod
    def from_json(cls, obj: dict) -> "CFExpansion":
        return cls(tuple(obj["preperiod"]), tuple(obj["period"]))


def _act(g: UnimodularMatrix, x: QuadExpr) -> QuadExpr:
    return (g.a * x + g.b) / (g.c * x + g.d)


def _cf_states(theta: QuadraticIrrational) -> Iterator[tuple[int, int, int]]:
    """Yield ``(P, Q, digit)`` for successive complete quotients of theta."""
    P, Q, D = theta.P, theta.Q, theta.D
    r = math.isqrt(D)
    while True:
        if Q > 0:
            a = (P + r) // Q
        else:
            a = -((P + r) // -Q) - 1
        yield P, Q, a
        P = a * Q - P
        Q = (D - P * P) // Q


def cf_expand(theta: QuadraticIrrational) -> CFExpansion:
    """Continued fraction of a quadratic irrational with its minimal period."""
    seen: dict[tuple[int, int], int] = {}
    digits: list[int] = []
    for P, Q, a in _cf_states(theta):
        if (P, Q) in seen:
            start = seen[(P, Q)]
            return CFExpansion(tuple(digits[:start]), tuple(digits[start:]))
        seen[(P, Q)] = len(digits)
        digits.append(a)
    raise AssertionError("unreachable")


def moebius_act(g: UnimodularMatrix, theta: QuadraticIrrational) -> QuadraticIrrational:
    """``(a*theta + b)/(c*theta + d)``."""
    return QuadraticIrrational.from_quad(_act(g, theta.value))


def fixes(g: UnimodularMatrix, theta: QuadraticIrrational) -> bool:
    return moebius_act(g, theta) == theta


def fixing_matrix(theta: QuadraticIrrational, periods: int = 1) -> UnimodularMatrix:
    """Matrix fixing ``theta`` built from ``periods`` copies of the minimal period.

    For an eventually periodic expansion the period product is conjugated by
    the preperiod matrix, so the result fixes ``theta`` itself; it may then
    have negative entries.  ``det == (-1)**(periods * len(period))``.
    """
    if periods < 1:
        raise ValueError("periods must be >= 1")
    cf = cf_expand(theta)
    m = matrix_product([digit_matrix(c) for c in cf.period]) ** periods
    head = matrix_product([digit_matrix(c) for c in cf.preperiod])
    g = head @ m @ head.inverse()
    assert fixes(g, theta), "fixing matrix does not fix theta"
    return g


def fixing_matrices(theta: QuadraticIrrational, max_periods: int = 4) -> list[UnimodularMatrix]:
    """All candidates ``fixing_matrix(theta, m)`` for ``m = 1..max_periods``."""
    return [fixing_matrix(theta, m) for m in range(1, max_periods + 1)]


@dataclass(frozen=True)
class ReducedFactorization:
    digits: tuple[int, ...]
    length: int
    primitive_power: int


def _peel(g: UnimodularMatrix) -> list[int] | None:
    # left-peel [[0,1],[1,k]]; every entry strictly shrinks the entry sum
    if g.is_identity():
        return []
    if not g.is_nonnegative():
        return None
    kmax = max(g.a, g.b, g.c, g.d)
    for k in range(1, kmax + 1):
        h00, h01 = g.c - k * g.a, g.d - k * g.b
        if h00 < 0 or h01 < 0:
            break
        rest = _peel(UnimodularMatrix(h00, h01, g.a, g.b))
        if rest is not None:
            return [k] + rest
    return None


def _primitive_power(word: Sequence[int]) -> int:
    n = len(word)
    for k in range(n, 0, -1):
        if n % k == 0:
            block = list(word[: n // k])
            if block * k == list(word):
                return k
    return 1


def reduced_factorization(g: UnimodularMatrix) -> ReducedFactorization:
    """Write ``g`` as a product of ``[[0,1],[1,k_i]]`` with ``k_i >= 1``."""
    digits = None if g.is_identity() else _peel(g)
    if digits is None:
        raise NotReduced(f"{g.tolist()} is not a reduced matrix")
    return ReducedFactorization(tuple(digits), len(digits), _primitive_power(digits))


def eigen_quad(g: UnimodularMatrix) -> tuple[QuadExpr, QuadExpr]:
    """Exact eigenvalues of ``g``, larger first."""
    t, det = g.trace, g.det
    disc = t * t - 4 * det
    if is_square(disc):
        s = math.isqrt(disc)
        return QuadExpr(Fraction(t + s, 2)), QuadExpr(Fraction(t - s, 2))
    if disc < 0:
        raise ValueError(f"{g.tolist()} has complex eigenvalues")
    half = Fraction(1, 2)
    return QuadExpr(Fraction(t, 2), half, disc), QuadExpr(Fraction(t, 2), -half, disc)
