from fractions import Fraction

import pytest
from hypothesis import given, settings

from gwlc.holonomic import LeafTable, derive_leaf_recurrence
from gwlc.offspring import OffspringDistribution
from gwlc.powerseries import leaf_numerators

from conftest import TEST_DISTRIBUTIONS, critical_laws

PERIODIC = OffspringDistribution((Fraction(4, 5), *[Fraction(0)] * 4, Fraction(1, 5)))


@pytest.mark.parametrize("name", sorted(TEST_DISTRIBUTIONS))
def test_table_matches_quadratic_recursion(name):
    d = TEST_DISTRIBUTIONS[name]
    table = LeafTable(d)
    table.ensure(150)
    assert table.nums[: 151] == list(leaf_numerators(d, 150).nums)


def test_periodic_support():
    table = LeafTable(PERIODIC)
    table.ensure(80)
    assert table.nums == list(leaf_numerators(PERIODIC, 80).nums)
    # five children per internal vertex: L = 1 mod 4
    assert table.prob(2) == 0 and table.prob(5) > 0 and table.prob(77) > 0


@settings(max_examples=8)
@given(critical_laws(max_degree=3, max_weight=4))
def test_recurrence_annihilates_series(d):
    rec = derive_leaf_recurrence(d)
    s = leaf_numerators(d, 40)
    coeffs = [s.coeff(m) for m in range(41)]
    assert all(rec.residual(coeffs, n) == 0 for n in range(41 - rec.top_shift))


def test_table_grows_incrementally():
    d = TEST_DISTRIBUTIONS["ternary"]
    a = LeafTable(d)
    a.ensure(60)
    a.ensure(200)
    b = LeafTable(d)
    b.ensure(200)
    assert a.nums == b.nums
    assert a.prob(0) == 0
