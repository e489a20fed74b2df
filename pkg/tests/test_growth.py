from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecklab.coxeter import builtin_systems
from hecklab.growth import DivergenceError, FreeAbelianProductGrowth, free_abelian_blocks, growth_coefficients

from oracles import series_quotient

SYSTEMS = builtin_systems()


def test_dihedral_and_free3_single_series():
    assert growth_coefficients(SYSTEMS["dihedral-inf"], 10).single() == series_quotient([1, 1], [1, -1], 11)
    assert growth_coefficients(SYSTEMS["free3"], 10).single() == series_quotient([1, 1], [1, -2], 11)


def test_closed_form_small_cases():
    two = FreeAbelianProductGrowth([1, 1])
    assert two.evaluate(Fraction(1, 3)) == Fraction(4, 3) / Fraction(2, 3)
    three = FreeAbelianProductGrowth([1, 1, 1])
    assert three.evaluate(0) == 1
    assert three.in_omega(0)
    assert three.in_omega(Fraction(49, 100))
    assert not three.in_omega(Fraction(1, 2))
    with pytest.raises(DivergenceError):
        three.evaluate(Fraction(1, 2))


@pytest.mark.parametrize("blocks", [(1, 1), (1, 1, 1), (2, 1), (2, 2), (2, 1, 1), (2, 2, 1), (1, 2, 2)])
def test_taylor_matches_bfs(blocks):
    closed = FreeAbelianProductGrowth(blocks)
    system = closed.system()
    degree = 10 if sum(blocks) <= 3 else 7
    bfs = growth_coefficients(system, degree)
    assert closed.single_taylor(degree) == bfs.single()
    # generators are their own class representatives in the right-angled case
    assert closed.taylor(min(degree, 6)) == {a: c for a, c in bfs.coefficients.items() if sum(a) <= min(degree, 6)}


def test_single_variable_specialisation():
    closed = FreeAbelianProductGrowth([1, 1, 1])
    assert closed.single_taylor(8) == series_quotient([1, 1], [1, -2], 9)


def test_free_abelian_blocks_detection():
    assert free_abelian_blocks(SYSTEMS["free3"]) == [(0,), (1,), (2,)]
    assert free_abelian_blocks(SYSTEMS["pentagon"]) is None
    assert free_abelian_blocks(SYSTEMS["a2"]) is None
    system = FreeAbelianProductGrowth([2, 1]).system()
    assert free_abelian_blocks(system) == [(0, 1), (2,)]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=2, max_size=3), st.data())
def test_evaluate_is_sum_of_series_inside_omega(blocks, data):
    closed = FreeAbelianProductGrowth(blocks)
    z = [Fraction(data.draw(st.integers(0, 5)), 40) for _ in range(closed.nvars)]
    assert closed.in_omega(z)
    # partial sums of positive terms increase to the closed form
    coeffs = closed.taylor(6)
    partial = sum(c * _monomial(z, a) for a, c in coeffs.items())
    assert partial <= closed.evaluate(z)


def _monomial(z, alpha):
    out = Fraction(1)
    for x, a in zip(z, alpha):
        out *= x**a
    return out


def test_denominator_matches_region_formula():
    closed = FreeAbelianProductGrowth([2, 1])
    for a, b, c in product([Fraction(0), Fraction(1, 4), Fraction(1)], repeat=3):
        expected = 1 / ((1 + a) * (1 + b)) + 1 / (1 + c) - 1
        assert closed.denominator([a, b, c]) == expected
