import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmanyons.bratteli import (
    FIBONACCI_MATRIX,
    BratteliDiagram,
    cone_compare,
    dimension_function_extend,
    fibonacci_diagram,
    fibonacci_dimension_function,
    from_continued_fraction,
    k0_quasi_type,
    k0_stationary,
    path_counts,
    satisfies_dimension_equation,
    telescope,
)
from rmanyons.errors import HypothesisViolated, NotInjective, NotPrimitive
from rmanyons.quadratic import GOLDEN, SILVER, QuadExpr, QuadraticIrrational, UnimodularMatrix, cf_expand

TEN = QuadraticIrrational(2, 3, 10)


def brute_paths(diagram: BratteliDiagram, n: int) -> list[int]:
    """Enumerate every labelled edge path from the root to level ``n``."""
    counts = [0] * diagram.level_sizes[n]

    def walk(level, vertex):
        if level == n:
            counts[vertex] += 1
            return
        for w, mult in enumerate(diagram.incidence[level][vertex]):
            for _ in range(mult):
                walk(level + 1, w)

    walk(0, 0)
    return counts


@st.composite
def diagrams(draw):
    levels = draw(st.integers(1, 6))
    sizes = [1] + [draw(st.integers(1, 3)) for _ in range(levels - 1)]
    inc = [
        [[draw(st.integers(0, 3)) for _ in range(sizes[k + 1])] for _ in range(sizes[k])]
        for k in range(levels - 1)
    ]
    return BratteliDiagram(tuple(sizes), inc)


# --- construction and paths ----------------------------------------------------


def test_cf_diagram_golden_ranks():
    d = from_continued_fraction(cf_expand(GOLDEN), 6)
    assert [r[0] for r in d.rank_vectors()] == [1, 1, 2, 3, 5, 8]


def test_cf_diagram_pell_ranks():
    d = from_continued_fraction(cf_expand(SILVER), 5)
    assert [r[0] for r in d.rank_vectors()] == [1, 2, 5, 12, 29]
    flipped = from_continued_fraction(cf_expand(SILVER), 5, convention="flipped")
    assert flipped.incidence[1] == ((0, 1), (1, 2))
    assert sum(flipped.rank_vectors()[3]) == sum(d.rank_vectors()[3])


def test_cf_diagram_single_level():
    d = from_continued_fraction(cf_expand(GOLDEN), 1)
    assert d.level_sizes == (1,) and d.rank_vectors() == [(1,)]


def test_rank_recursion_and_denominators():
    cf = cf_expand(TEN)
    d = from_continued_fraction(cf, 8)
    q = [qn for _, qn in cf.convergents(8)]
    ranks = d.rank_vectors()
    for n in range(1, 8):
        assert ranks[n] == (q[n], q[n - 1])


def test_fibonacci_totals():
    fib = [0, 1]
    while len(fib) < 40:
        fib.append(fib[-1] + fib[-2])
    d = fibonacci_diagram(26)
    for n in range(1, 26):
        assert sum(path_counts(d, n)) == fib[n + 1]
    assert path_counts(d, 0) == (1,)


def test_stationary_two_one_one_zero_totals_by_enumeration():
    phi = ((2, 1), (1, 0))
    from_anyon = BratteliDiagram.stationary(phi, 6, (2, 1))
    from_vacuum = BratteliDiagram.stationary(phi, 6, (1, 0))
    assert [sum(brute_paths(from_anyon, n)) for n in range(5)] == [1, 3, 7, 17, 41]
    assert [sum(brute_paths(from_vacuum, n)) for n in range(5)] == [1, 1, 3, 7, 17]
    # 1, 3, 8, 21 is the sequence of [[2,1],[1,1]], the square of the Fibonacci matrix
    square = BratteliDiagram.stationary(((2, 1), (1, 1)), 5, (2, 1))
    assert [sum(brute_paths(square, n)) for n in range(4)] == [1, 3, 8, 21]


@settings(max_examples=80, deadline=None)
@given(diagrams())
def test_path_counts_match_enumeration(d):
    for n in range(d.n_levels):
        assert list(path_counts(d, n)) == brute_paths(d, n)


def test_telescope_examples():
    fib = fibonacci_diagram(9)
    t = telescope(fib, [1, 3, 5, 7])
    assert all(m == ((2, 1), (1, 1)) for m in t.incidence[1:])
    ten = from_continued_fraction(cf_expand(TEN), 10)
    # digits (1, 1, 2) drive the steps out of levels 2, 3, 4
    t = telescope(ten, [2, 5, 8])
    assert t.incidence[1:] == (((5, 2), (3, 1)),) * 2
    assert telescope(fib, list(range(9))) == fib


@settings(max_examples=40, deadline=None)
@given(diagrams(), st.data())
def test_telescope_preserves_counts(d, data):
    if d.n_levels < 2:
        return
    cuts = sorted(data.draw(st.sets(st.integers(1, d.n_levels - 1), min_size=1)))
    t = telescope(d, cuts)
    for k, level in enumerate([0] + cuts):
        assert path_counts(t, k) == path_counts(d, level)


def test_json_and_dot():
    d = fibonacci_diagram(4)
    assert BratteliDiagram.from_json(d.to_json()) == d
    d2 = BratteliDiagram.stationary(((2, 1), (1, 0)), 3, (1, 1))
    dot = d2.to_dot()
    assert dot.startswith("digraph") and 'label="2"' in dot


def test_diagram_validation():
    with pytest.raises(ValueError):
        BratteliDiagram((2,), ())
    with pytest.raises(ValueError):
        BratteliDiagram((1, 2), [[[1, -1]]])


# --- ordered K0 ----------------------------------------------------------------


def test_k0_fibonacci_cone():
    k0 = k0_stationary(FIBONACCI_MATRIX)
    tau = GOLDEN.value
    assert k0.functional == (tau, QuadExpr(1))
    assert k0.is_positive((1, -1))
    assert k0.is_positive((0, 0))
    assert not k0.is_positive((-1, 1))


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(-40, 40), st.integers(-40, 40))
def test_k0_cone_properties(a, b, c, d):
    k0 = k0_stationary(((2, 1), (1, 1)))
    h, k = (a, b), (c, d)
    if k0.is_positive(h) and k0.is_positive(k):
        assert k0.is_positive((a + c, b + d))
    if h != (0, 0):
        assert not (k0.is_positive(h) and k0.is_positive((-a, -b)))
    fib = k0_stationary(FIBONACCI_MATRIX)
    assert fib.is_positive(h) == ((a * GOLDEN.value + b).sign() >= 0)


def test_k0_not_primitive():
    with pytest.raises(NotPrimitive):
        k0_stationary(((0, 1), (1, 0)))
    with pytest.raises(NotPrimitive):
        k0_stationary(((1, 1), (0, 1)))


def test_cone_compare_identity_cases():
    for theta, g in ((GOLDEN, UnimodularMatrix(1, 1, 1, 0)), (SILVER, UnimodularMatrix(2, 1, 1, 0))):
        report = cone_compare(theta, g)
        display = report["conventions"]["display"]
        assert display["identity_is_isomorphism"]
        assert display["grid_disagreements"] == 0


def test_cone_compare_reports_ten():
    report = cone_compare(TEN, UnimodularMatrix(5, 2, 3, 1))
    assert set(report["conventions"]) == {"display", "swapped"}
    for conv in report["conventions"].values():
        assert {"found", "isomorphisms", "intertwining", "grid_disagreements"} <= set(conv)


def test_cone_compare_hypotheses():
    with pytest.raises(HypothesisViolated):
        cone_compare(GOLDEN, UnimodularMatrix(2, 1, 1, 0))
    with pytest.raises(HypothesisViolated):
        cone_compare(GOLDEN, UnimodularMatrix(2, 1, 1, 1))


# --- quasi-isomorphism type ------------------------------------------------------


def test_quasi_type_examples():
    q = k0_quasi_type(((1, 1), (1, 0)))
    (s,) = q.summands
    assert s.degree == 2 and s.is_unit and s.norm == -1 and s.descriptor == "O_lam"
    q = k0_quasi_type(((2, 0), (0, 3)))
    assert sorted(s.descriptor for s in q.summands) == ["Z[1/2]", "Z[1/3]"]
    q = k0_quasi_type(((1, 0), (0, 1)))
    (s,) = q.summands
    assert s.descriptor == "Z" and s.multiplicity == 2 and s.jordan_blocks == (1, 1)
    with pytest.raises(NotInjective):
        k0_quasi_type(((1, 1), (1, 1)))


def test_quasi_type_jordan_block():
    (s,) = k0_quasi_type(((2, 1), (0, 2))).summands
    assert s.jordan_blocks == (2,)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=9, max_size=9))
def test_quasi_type_dimension_sum(entries):
    phi = (tuple(entries[0:3]), tuple(entries[3:6]), tuple(entries[6:9]))
    try:
        q = k0_quasi_type(phi)
    except NotInjective:
        return
    assert sum(s.degree * s.multiplicity for s in q.summands) == 3
    for s in q.summands:
        assert s.is_unit == (abs(s.norm) == 1)


# --- dimension functions -------------------------------------------------------


def test_f1_values():
    f1 = fibonacci_dimension_function("1", 6)
    assert f1.vertex_values() == [1, 1, 1, 2, 1, 3, 2, 5, 3, 8, 5]
    assert all(ok for *_, ok in f1.check())


def test_ftau_values():
    ft = fibonacci_dimension_function("tau", 6)
    assert ft.vertex_values()[1:] == [3, 2, 5, 3, 8, 5, 13, 8, 21, 13]
    assert ft.values[0] == (None,) and ft.defined_from == 1


def test_zero_seed():
    f = dimension_function_extend(fibonacci_diagram(5, root="anyon"), 2, (0, 0))
    assert set(f.vertex_values()) == {0}


def test_backward_extension_from_late_seed():
    d = fibonacci_diagram(8, root="anyon")
    f = dimension_function_extend(d, 5, (8, 5))
    assert f.vertex_values() == fibonacci_dimension_function("1", 8).vertex_values()


def test_sum_is_pointwise_where_defined():
    f1 = fibonacci_dimension_function("1", 7)
    ft = fibonacci_dimension_function("tau", 7)
    s = f1 + ft
    for k in range(1, 7):
        assert s.values[k] == tuple(a + b for a, b in zip(f1.values[k], ft.values[k]))
    assert all(ok for *_, ok in s.check())


def test_dimension_function_needs_fibonacci_diagram():
    with pytest.raises(HypothesisViolated):
        dimension_function_extend(BratteliDiagram.stationary(((2, 1), (1, 0)), 4, (1, 1)), 1, (1, 1))


def test_dimension_equation_checker_flags_errors():
    d = fibonacci_diagram(3, root="anyon")
    bad = ((1,), (1, 1), (3, 1))
    results = satisfies_dimension_equation(d, bad)
    assert not all(ok for *_, ok in results)
