import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmanyons.acceptance import random_admissible
from rmanyons.errors import NoAdmissibleMatrix, NoCommonBasis, NotDecomposable
from rmanyons.fusion import (
    FusionSystem,
    K0Class,
    check_s_tilde,
    decompose_nonneg,
    f_matrix_hom_type,
    f_matrix_size,
    fusion_ring_multiply,
    k0_class_of_power,
    rm_anyon_system,
    s_tilde,
    simultaneous_eigen,
    verify_axioms,
    verlinde_check,
)
from rmanyons.quadratic import GOLDEN, SILVER, QuadraticIrrational, UnimodularMatrix, eigen_quad

TAU = (1 + math.sqrt(5)) / 2
TEN = QuadraticIrrational(2, 3, 10)


def test_fibonacci_axioms_and_dimensions():
    F = FusionSystem.fibonacci()
    assert verify_axioms(F).passed
    assert np.allclose(F.quantum_dimensions(), [1, TAU])
    assert math.isclose(F.total_dimension(), math.sqrt(1 + TAU**2))


@pytest.mark.parametrize("trace", range(0, 7))
def test_two_label_axioms(trace):
    F = FusionSystem.two_label(trace)
    assert verify_axioms(F).passed
    assert verlinde_check(F) < 1e-12


def test_broken_fusion_rules_are_reported():
    # x1 x0 = x0 + x1 breaks the unit law and commutativity
    bad = FusionSystem(("0", "1"), (0, 1), [[[1, 0], [0, 1]], [[1, 1], [1, 1]]])
    report = verify_axioms(bad)
    assert not report.passed
    assert "vacuum_unit" in report.failed() and "commutativity" in report.failed()


def test_fibonacci_s_matrix():
    sd = simultaneous_eigen(FusionSystem.fibonacci())
    a, b = 1 / math.sqrt(1 + TAU**2), TAU / math.sqrt(1 + TAU**2)
    assert np.allclose(sd.S, [[a, b], [b, -a]], atol=1e-12)
    assert np.allclose(sd.eigenvalues[1], [TAU, -1 / TAU])
    assert sd.residual < 1e-12


def test_silver_s_matrix_normalization():
    sd = simultaneous_eigen(FusionSystem.two_label(2))
    assert math.isclose(abs(sd.S[0, 0]), 1 / math.sqrt(4 + 2 * math.sqrt(2)), rel_tol=1e-12)
    assert np.allclose(sd.S @ sd.S.conj().T, np.eye(2))


def test_non_normal_system_has_no_common_basis():
    # N_1 = [[0, 1], [0, 0]] is nilpotent, hence not normal
    F = FusionSystem(("x0", "x1"), (0, 1), (((1, 0), (0, 1)), ((0, 1), (0, 0))))
    with pytest.raises(NoCommonBasis):
        simultaneous_eigen(F)


def test_ring_multiply_examples():
    F = FusionSystem.fibonacci()
    assert fusion_ring_multiply((0, 1), (0, 1), F) == (1, 1)
    assert fusion_ring_multiply((1, 0), (3, 4), F) == (3, 4)
    with pytest.raises(ValueError):
        fusion_ring_multiply((1,), (1, 0), F)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5), st.lists(st.integers(-5, 5), min_size=6, max_size=6))
def test_ring_homomorphism_to_dimensions(trace, coeffs):
    F = FusionSystem.two_label(trace)
    u, v, w = coeffs[0:2], coeffs[2:4], coeffs[4:6]
    dims = F.quantum_dimensions()
    uv = fusion_ring_multiply(u, v, F)
    assert math.isclose(np.dot(uv, dims), np.dot(u, dims) * np.dot(v, dims), abs_tol=1e-9)
    assert fusion_ring_multiply(uv, w, F) == fusion_ring_multiply(u, fusion_ring_multiply(v, w, F), F)


def test_json_round_trip():
    F = FusionSystem.two_label(3)
    assert FusionSystem.from_json(F.to_json()) == F


# --- K0 classes ----------------------------------------------------------------


def test_k0_class_arithmetic():
    one = K0Class(1, 0, GOLDEN)
    t = K0Class(0, 1, GOLDEN)
    assert t * t == t + one
    assert (t - one).value == GOLDEN.value - 1
    assert t.scale(3) == K0Class(0, 3, GOLDEN)
    assert K0Class.from_value(t.value * t.value, GOLDEN) == K0Class(1, 1, GOLDEN)
    with pytest.raises(ValueError):
        t + K0Class(0, 1, SILVER)


@pytest.mark.parametrize("theta, g", [(GOLDEN, UnimodularMatrix(1, 1, 1, 0)), (SILVER, UnimodularMatrix(2, 1, 1, 0))])
def test_k0_power_is_multiplicative(theta, g):
    for j in range(0, 4):
        for k in range(0, 4):
            assert k0_class_of_power(g, theta, j) * k0_class_of_power(g, theta, k) == k0_class_of_power(
                g, theta, j + k
            )
    lam = g.c * theta.value + g.d
    assert k0_class_of_power(g, theta, 1).value == lam
    assert k0_class_of_power(g, theta, 0) == K0Class(1, 0, theta)


def test_cube_decomposes_with_square_trace():
    for theta, g in ((GOLDEN, UnimodularMatrix(1, 1, 1, 0)), (SILVER, UnimodularMatrix(2, 1, 1, 0))):
        T = g.trace
        assert decompose_nonneg(k0_class_of_power(g, theta, 3), g, theta) == (T * T + 1, T)


def test_decompose_rejects_negative_and_nonmultiples():
    g = UnimodularMatrix(2, 1, 1, 0)
    with pytest.raises(NotDecomposable):
        decompose_nonneg(K0Class(-3, 1, SILVER), g, SILVER)
    with pytest.raises(NotDecomposable):
        decompose_nonneg(K0Class(0, 1, SILVER), UnimodularMatrix(1, 0, 0, 1), SILVER)


def test_hom_type_and_sizes():
    g = UnimodularMatrix(1, 1, 1, 0)
    h = f_matrix_hom_type(1, 1, 1, 1, g, GOLDEN)
    assert h.exponent == 2 and h.multiplicity == 2
    assert h.module_class == k0_class_of_power(g, GOLDEN, 2)
    assert f_matrix_hom_type(1, 1, 1, 0, g, GOLDEN).exponent == 3
    for t in range(0, 5):
        assert f_matrix_size(FusionSystem.two_label(t), 1, 1, 1, 1) == 1 + t * t
        assert f_matrix_size(FusionSystem.two_label(t), 1, 1, 1, 0) == t
    with pytest.raises(ValueError):
        f_matrix_hom_type(2, 1, 1, 1, g, GOLDEN)


# --- RM anyon systems ------------------------------------------------------------


def test_rm_anyon_golden():
    rm = rm_anyon_system(GOLDEN)
    assert rm.g == UnimodularMatrix(1, 1, 1, 0)
    assert rm.lam == GOLDEN.value
    assert rm.fusion == FusionSystem.fibonacci()
    assert rm.n1_display == [[1, 1], [1, 0]]
    assert all(v < 1e-12 for v in rm.checks.values())


def test_rm_anyon_silver_and_ten():
    assert rm_anyon_system(SILVER).trace == 2
    rm = rm_anyon_system(TEN)
    assert rm.g.det == -1 and rm.g.is_nonnegative()
    assert all(v < 1e-10 for v in rm.checks.values())


def test_rm_anyon_needs_odd_period():
    with pytest.raises(NoAdmissibleMatrix):
        rm_anyon_system(QuadraticIrrational(1, 2, 3))


def test_s_tilde_properties():
    for lam in (0.3, 1.0, TAU, 7.5):
        S = s_tilde(lam)
        assert np.allclose(S, S.T) and np.allclose(S @ S, np.eye(2))


def test_random_admissible_pairs():
    pairs = random_admissible(20, seed=7)
    assert len(pairs) == 20
    for theta, g in pairs:
        rm = rm_anyon_system(theta)
        assert rm.g.det == -1
        eig = [float(v) for v in eigen_quad(rm.g)]
        checks = check_s_tilde(rm.S, rm.trace, eig)
        assert max(checks.values()) < 1e-9
        assert verify_axioms(rm.fusion).passed
        assert verlinde_check(rm.fusion) < 1e-9 * max(1, rm.trace**2)
