"""Exact rational measures and the label-simplex grid."""

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from pflab import GridTooLarge, Measure, SpecError, grid_size, mask_of, measure_grid


def test_measure_validation():
    with pytest.raises(SpecError):
        Measure(())
    with pytest.raises(SpecError):
        Measure((Fraction(1, 2), Fraction(1, 3)))  # sums to 5/6
    with pytest.raises(SpecError):
        Measure((Fraction(3, 2), Fraction(-1, 2)))  # negative weight


def test_delta_and_uniform():
    d = Measure.delta(4, 2)
    assert d.weights == (0, 0, 1, 0)
    u = Measure.uniform_over(4, [1, 3])
    assert u.weights == (0, Fraction(1, 2), 0, Fraction(1, 2))
    with pytest.raises(SpecError):
        Measure.delta(2, 5)
    with pytest.raises(SpecError):
        Measure.uniform_over(3, [])


def test_mass_and_miss_mass_are_complements():
    m = Measure((Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)))
    s = mask_of([0, 2])
    assert m.mass(s) == Fraction(2, 3)
    assert m.miss_mass(s) == Fraction(1, 3)
    assert m.mass(s) + m.miss_mass(s) == 1
    assert m.mass(0) == 0
    assert m.miss_mass(0b111) == 0


def test_grid_size_matches_stars_and_bars():
    for n in range(1, 5):
        for g in range(1, 6):
            assert grid_size(n, g) == comb(g + n - 1, n - 1)


def test_measure_grid_enumeration():
    pts = measure_grid(2, 4)
    assert len(pts) == 5
    assert len(set(pts)) == 5
    for m in pts:
        assert sum(m.weights) == 1
        assert all(w.denominator in (1, 2, 4) for w in m.weights)
    # deltas always appear
    assert Measure.delta(2, 0) in pts
    assert Measure.delta(2, 1) in pts


def test_measure_grid_budget():
    with pytest.raises(GridTooLarge):
        measure_grid(10, 60, budget=1000)


@given(st.integers(min_value=2, max_value=4), st.integers(min_value=1, max_value=5))
def test_grid_count_agrees_with_size(n, g):
    assert len(measure_grid(n, g)) == grid_size(n, g)


def test_measure_grid_rejects_degenerate_inputs():
    with pytest.raises(SpecError):
        measure_grid(1, 3)
    with pytest.raises(SpecError):
        measure_grid(2, 0)


@given(
    st.integers(min_value=2, max_value=4).flatmap(
        lambda n: st.tuples(st.just(n), st.integers(min_value=0, max_value=(1 << n) - 1))
    )
)
def test_uniform_miss_mass_is_proportional(args):
    n, mask = args
    support = tuple(range(n))
    u = Measure.uniform_over(n, support)
    inside = bin(mask).count("1")
    assert u.miss_mass(mask) == Fraction(n - inside, n)
