import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmanyons.errors import BadParams, BranchCut, IllConditioned
from rmanyons.qtorus import (
    TruncatedWeylSeries,
    _psi_coefficients,
    clock_shift,
    convergent_gates,
    dilog_pentagon_residual,
    principal_power,
    psi_of_monomial,
    qdilog_matrix,
    qdilog_root_of_unity,
    sample_unit_pairs,
    weyl_pentagon_check,
    weyl_pentagon_sides,
)
from rmanyons.quadratic import GOLDEN, SILVER

# --- clock and shift -------------------------------------------------------------


@pytest.mark.parametrize("p, q", [(1, 1), (1, 2), (2, 5), (3, 7), (89, 144)])
def test_clock_shift_relations(p, q):
    g = clock_shift(p, q)
    I = np.eye(q)
    assert g.commutation_residual() < 1e-12
    assert np.allclose(np.linalg.matrix_power(g.U, q), I)
    assert np.allclose(np.linalg.matrix_power(g.V, q), I)
    assert np.allclose(g.U @ g.U.conj().T, I) and np.allclose(g.V @ g.V.conj().T, I)


def test_clock_shift_rejects_bad_input():
    with pytest.raises(BadParams):
        clock_shift(2, 4)
    with pytest.raises(BadParams):
        clock_shift(1, 0)


def test_convergent_gates():
    g = convergent_gates(GOLDEN, 12)
    assert (g.p, g.q) == (233, 144)
    assert g.commutation_residual() < 1e-12
    s = convergent_gates(SILVER, 4)
    assert (s.p, s.q) == (29, 12)
    with pytest.raises(BadParams):
        convergent_gates(GOLDEN, 0)


# --- Weyl series -------------------------------------------------------------------


def _series(q, deg, coeffs):
    return TruncatedWeylSeries(q, deg, dict(coeffs))


series_terms = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.fractions(min_value=-3, max_value=3, max_denominator=5),
    max_size=5,
)


@settings(max_examples=60, deadline=None)
@given(series_terms, series_terms, series_terms)
def test_weyl_product_is_associative_exactly(x, y, z):
    q = Fraction(2, 7)
    X, Y, Z = (_series(q, 5, c) for c in (x, y, z))
    lhs, rhs = (X * Y) * Z, X * (Y * Z)
    assert lhs.max_abs_diff(rhs) == 0


def test_weyl_commutation_rule():
    q = Fraction(1, 3)
    U = TruncatedWeylSeries.monomial(q, 4, 1, 0)
    V = TruncatedWeylSeries.monomial(q, 4, 0, 1)
    assert (V * U).coeffs == {(1, 1): 1 / q}
    assert (U * V).coeffs == {(1, 1): 1}


def test_psi_coefficients_match_truncated_product():
    q, K, n_max = 0.35, 400, 8
    poly = np.array([1.0])
    for k in range(K):
        poly = np.convolve(poly, [1.0, -(q**k)])[: n_max + 1]
    assert np.allclose(_psi_coefficients(q, n_max), poly, atol=1e-12)


def test_psi_of_monomial_powers():
    q = Fraction(1, 2)
    psi = psi_of_monomial(q, 6, 1, 1, 3)
    x = TruncatedWeylSeries.monomial(q, 6, 1, 1, 3)
    power = TruncatedWeylSeries.one(q, 6)
    c = _psi_coefficients(q, 3)
    expected = TruncatedWeylSeries.one(q, 6)
    expected.coeffs.clear()
    for n in range(4):
        term = power._like({k: v * c[n] for k, v in power.coeffs.items()})
        expected = expected + term
        power = power * x
    assert psi.max_abs_diff(expected) == 0
    with pytest.raises(ValueError):
        psi_of_monomial(q, 4, 0, 0)


@pytest.mark.parametrize("q", [0.3, 0.5 + 0.1j, -0.4, 0.05])
def test_weyl_pentagon_float(q):
    lhs, rhs = weyl_pentagon_sides(q, 10)
    # small q makes the -q^{-1} UV coefficients large, so compare relative to their size
    scale = max(abs(c) for c in rhs.coeffs.values())
    assert lhs.max_abs_diff(rhs) < 1e-13 * scale
    assert weyl_pentagon_check(q, 10) == lhs.max_abs_diff(rhs)


def test_weyl_pentagon_exact():
    assert weyl_pentagon_check(Fraction(1, 3), 8, exact=True) == 0.0
    lhs, rhs = weyl_pentagon_sides(0.25, 6, exact=True)
    assert all(isinstance(v, Fraction) for v in lhs.coeffs.values())


def test_weyl_pentagon_needs_middle_factor():
    assert weyl_pentagon_check(0.3, 2, drop_middle=True) > 0.1
    assert weyl_pentagon_check(0.3, 0) == 0


@pytest.mark.parametrize("q, degree", [(1.0, 4), (1.5j, 4), (0.3, 13), (0.3, -1)])
def test_weyl_pentagon_bad_params(q, degree):
    with pytest.raises(BadParams):
        weyl_pentagon_check(q, degree)


def test_exact_needs_rational_q():
    with pytest.raises(BadParams):
        weyl_pentagon_check(0.3 + 0.1j, 3, exact=True)


# --- quantum dilogarithm at roots of unity ----------------------------------------


def test_qdilog_order_two_value():
    assert math.isclose(qdilog_root_of_unity(-1, 2, 0.5).real, 0.75983568565, rel_tol=1e-10)


def test_qdilog_matches_mpmath():
    N, z = 3, mpmath.mpf("0.2")
    zeta = mpmath.exp(2j * mpmath.pi / N)
    with mpmath.workdps(40):
        ref = mpmath.power(1 - z**N, mpmath.mpf(N - 1) / (2 * N))
        for k in range(1, N):
            ref *= mpmath.power(1 - zeta**k * z, mpmath.mpf(-k) / N)
    got = qdilog_root_of_unity(cmath.exp(2j * math.pi / N), N, 0.2)
    assert abs(got - complex(ref)) < 1e-13


def test_qdilog_branch_cut_is_reported():
    with pytest.raises(BranchCut):
        qdilog_root_of_unity(-1, 2, 2.0)
    log = []
    qdilog_root_of_unity(-1, 2, 0.5, log)
    assert len(log) == 2 and not any(e["on_cut"] for e in log)


def test_qdilog_rejects_non_primitive_roots():
    with pytest.raises(BadParams):
        qdilog_root_of_unity(1, 2, 0.3)
    with pytest.raises(BadParams):
        qdilog_root_of_unity(0.5, 2, 0.3)


def test_principal_power():
    assert principal_power(-4, 2) == 16
    assert principal_power(4, Fraction(1, 2)) == pytest.approx(2)
    with pytest.raises(BranchCut):
        principal_power(-4, Fraction(1, 2))
    assert principal_power(-4 + 1e-3j, Fraction(1, 2)).real > 0


def test_qdilog_matrix_diagonal_and_conjugation():
    zeta, N = cmath.exp(2j * math.pi / 3), 3
    D = np.diag([0.2, 0.3j, -0.1 + 0.1j])
    out = qdilog_matrix(zeta, N, D)
    assert np.allclose(np.diag(out), [qdilog_root_of_unity(zeta, N, x) for x in np.diag(D)])
    rng = np.random.default_rng(1)
    P = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    A = P @ D @ np.linalg.inv(P)
    assert np.allclose(qdilog_matrix(zeta, N, A), P @ out @ np.linalg.inv(P), atol=1e-10)


def test_qdilog_matrix_rejects_jordan_block():
    with pytest.raises(IllConditioned):
        qdilog_matrix(-1, 2, np.array([[0.3, 1.0], [0.0, 0.3]]))


# --- dilogarithm pentagon diagnostic ---------------------------------------------


def test_dilog_pentagon_order_one_is_exact():
    u, v = sample_unit_pairs(1, 5)[0]
    report = dilog_pentagon_residual(0, 1, u, v)
    assert report["residual"] < 1e-12


def test_dilog_pentagon_report_shape():
    u, v = sample_unit_pairs(1, 0)[0]
    report = dilog_pentagon_residual(1, 3, u, v)
    assert {"p", "q", "u", "v", "prefactors", "residual", "lhs_norm", "branch_log"} <= set(report)
    assert math.isfinite(report["residual"]) and report["branch_log"]


def test_dilog_pentagon_bad_params():
    w = cmath.exp(1j * math.pi / 3)
    with pytest.raises(BadParams):
        dilog_pentagon_residual(1, 2, 2.0, 1j)
    with pytest.raises(BadParams):
        dilog_pentagon_residual(1, 2, 1.0, w)
    with pytest.raises(BadParams):
        dilog_pentagon_residual(0, 1, w, w.conjugate())


def test_sample_unit_pairs_deterministic():
    assert sample_unit_pairs(3, 9) == sample_unit_pairs(3, 9)
    assert all(math.isclose(abs(u), 1) and math.isclose(abs(v), 1) for u, v in sample_unit_pairs(5, 2))
