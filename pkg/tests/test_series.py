import pytest
from hypothesis import given, strategies as st

from saddlenf.errors import StructureError
from saddlenf.scalar import COMPLEX, GAUSSIAN, RATIONAL, rational
from saddlenf.series import (
    PlanarMap,
    Series2,
    axis_preserving,
    from_view,
    map_compose,
    map_eval,
    map_inverse,
    to_multiplier_view,
)
from saddlenf.verify import kernel_table, naive_compose, naive_inverse

from helpers import random_map

Q = rational


def test_series_product_examples():
    one_x1 = Series2(RATIONAL, 2, {(0, 0): Q(1), (1, 0): Q(1)})
    one_x2 = Series2(RATIONAL, 2, {(0, 0): Q(1), (0, 1): Q(1)})
    assert (one_x1 * one_x2).terms() == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}
    assert (one_x1 * Series2.zero(RATIONAL, 2)).is_zero()
    geo = Series2(RATIONAL, 3, {(j, 0): Q(1) for j in range(4)})
    assert (geo * geo).terms() == {(0, 0): 1, (1, 0): 2, (2, 0): 3, (3, 0): 4}


def test_compose_examples():
    F = random_map(1, 6)
    assert map_compose(F, PlanarMap.identity(RATIONAL, 6)) == F
    L = PlanarMap.linear(RATIONAL, 4, Q(2), Q(3))
    shear = PlanarMap.from_terms(RATIONAL, 4, Q(1), Q(1), [(1, (0, 2), Q(1))])
    assert map_compose(L, shear) == PlanarMap.from_terms(RATIONAL, 4, Q(2), Q(3), [(1, (0, 2), Q(2))])


@pytest.mark.parametrize("seed", range(3))
def test_compose_associative(seed):
    F, G, H = (random_map(seed * 3 + j, 6) for j in range(3))
    assert map_compose(map_compose(F, G), H) == map_compose(F, map_compose(G, H))


def test_inverse_examples():
    L = PlanarMap.linear(RATIONAL, 5, Q("1/4"), Q(8))
    assert map_inverse(L) == PlanarMap.linear(RATIONAL, 5, Q(4), Q("1/8"))
    F = PlanarMap.from_terms(RATIONAL, 4, Q(2), Q(3), [(2, (2, 0), Q(1))])
    G = map_inverse(F)
    assert G.term_records() == [(2, (2, 0), Q("-1/12"))]
    assert (G.mu1, G.mu2) == (Q("1/2"), Q("1/3"))
    ident = PlanarMap.identity(RATIONAL, 4)
    assert map_compose(F, G) == ident and map_compose(G, F) == ident


@pytest.mark.parametrize("ring", [RATIONAL, GAUSSIAN])
def test_inverse_is_exact_at_degree_twelve(ring):
    F = random_map(7, 12, ring, density=0.4)
    assert map_compose(F, map_inverse(F)) == PlanarMap.identity(ring, 12)


def test_axis_preserving_inverse():
    for seed in range(20):
        F = random_map(100 + seed, 8, axis=True)
        assert axis_preserving(F) and axis_preserving(map_inverse(F))


@pytest.mark.parametrize("seed", range(20))
def test_kernels_match_substitution_oracle(seed):
    ring = GAUSSIAN if seed % 4 == 3 else RATIONAL
    F, G = random_map(seed, 5, ring), random_map(seed + 50, 5, ring)
    assert kernel_table(map_compose(F, G)) == naive_compose(F, G)
    assert kernel_table(map_inverse(F)) == naive_inverse(F)


def test_multiplier_view():
    L = PlanarMap.linear(RATIONAL, 4, Q("1/4"), Q(8))
    view = to_multiplier_view(L)
    assert view.c1 == {} and view.c2 == {}
    F = PlanarMap.from_terms(RATIONAL, 4, Q("1/4"), Q(8), [(1, (1, 2), Q(5))])
    assert to_multiplier_view(F).coefficients(1) == {(0, 2): 5}
    assert from_view(to_multiplier_view(F)) == F
    bad = PlanarMap.from_terms(RATIONAL, 4, Q("1/4"), Q(8), [(1, (0, 2), Q(1))])
    with pytest.raises(StructureError) as exc:
        to_multiplier_view(bad)
    assert exc.value.witnesses[0][:2] == (1, (0, 2))


def test_eval_examples():
    ident = PlanarMap.identity(COMPLEX, 3)
    assert map_eval(ident, (0.1, 0.2)) == (0.1, 0.2)
    F = PlanarMap.from_terms(RATIONAL, 4, Q(2), Q(3), [(2, (2, 0), Q(1))])
    assert map_eval(F, (Q(1), Q(1))) == (2, 4)


@pytest.mark.parametrize("seed", range(5))
def test_eval_commutes_with_compose(seed):
    D = 6
    F = random_map(seed, D, COMPLEX)
    G = random_map(seed + 9, D, COMPLEX)
    z = (1e-3, -7e-4j)
    lhs = map_eval(map_compose(F, G), z)
    rhs = map_eval(F, map_eval(G, z))
    norm = max(F.max_abs(), G.max_abs(), 1.0) ** (D + 1)
    tol = 10 * (1e-3) ** (D + 1) * norm * 2 ** (2 * D)
    assert max(abs(a - b) for a, b in zip(lhs, rhs)) <= tol


@given(st.integers(0, 10**6))
def test_sum_and_difference_round_trip(seed):
    F, G = random_map(seed, 4), random_map(seed + 1, 4)
    assert (F.component(1) + G.component(1)) - G.component(1) == F.component(1)
