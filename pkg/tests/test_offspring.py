import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gwlc.errors import (
    DegenerateUnaryError,
    GWLCError,
    NegativeProbabilityError,
    NotCriticalError,
    SumNotOneError,
    ZeroExtinctionError,
)
from gwlc.offspring import (
    NAMED_DISTRIBUTIONS,
    OffspringDistribution,
    load_distribution,
    reduce_distribution,
    to_fraction,
    validate_offspring,
)

from conftest import BINARY, P1DEMO, critical_laws


def test_binary_constants():
    d = validate_offspring(["1/2", 0, "1/2"], require_critical=True)
    assert d.mean == 1 and d.variance == 1
    assert d.gamma_leaf == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-15)


def test_p1demo_constants():
    d = validate_offspring([[3, 10], [4, 10], [3, 10]], require_critical=True)
    assert d == P1DEMO
    assert d.mean == 1 and d.variance == Fraction(3, 5)


def test_not_critical():
    d = validate_offspring(["1/2", "1/2"])
    assert d.mean == Fraction(1, 2) and d.regime == "subcritical"
    with pytest.raises(NotCriticalError):
        validate_offspring(["1/2", "1/2"], require_critical=True)


@pytest.mark.parametrize(
    "probs, error",
    [
        (["-1/2", "1/2", "1"], NegativeProbabilityError),
        (["1/2", "1/3"], SumNotOneError),
        ([0, 0, 1], ZeroExtinctionError),
        ([0, 1], ZeroExtinctionError),
        ([], GWLCError),
    ],
)
def test_validation_errors(probs, error):
    with pytest.raises(error):
        validate_offspring(probs)


def test_unary_degenerate_is_caught():
    # p1 = 1 forces p0 = 0, which is reported first; the unary check stands alone too
    with pytest.raises((DegenerateUnaryError, ZeroExtinctionError)):
        OffspringDistribution((Fraction(0), Fraction(1)))


def test_decimal_strings_are_exact():
    assert to_fraction("0.3") == Fraction(3, 10)
    assert to_fraction(["3", "10"]) == Fraction(3, 10)
    with pytest.raises(GWLCError):
        to_fraction(0.3)
    with pytest.raises(GWLCError):
        to_fraction(True)
    with pytest.raises(GWLCError):
        to_fraction([1, 0])


def test_trailing_zeros_dropped():
    d = validate_offspring(["1/2", 0, "1/2", 0, 0])
    assert d == BINARY and d.max_degree == 2


@pytest.mark.parametrize(
    "probs, expected",
    [
        (["3/10", "4/10", "3/10"], ["1/2", 0, "1/2"]),
        (["1/2", 0, "1/2"], ["1/2", 0, "1/2"]),
        (["1/4", "1/2", "1/4"], ["1/2", 0, "1/2"]),
    ],
)
def test_reduce_examples(probs, expected):
    assert reduce_distribution(validate_offspring(probs)) == validate_offspring(expected)


@given(critical_laws())
def test_reduce_idempotent_and_critical(d):
    r = reduce_distribution(d)
    assert reduce_distribution(r) == r
    assert r.p1 == 0 and r.mean == 1


@given(critical_laws())
def test_gamma_relation(d):
    assert d.gamma_series == pytest.approx(2 * math.sqrt(math.pi) * d.gamma_leaf, rel=1e-12)


def test_json_round_trip(tmp_path):
    text = P1DEMO.to_json()
    assert json.loads(text) == {"probs": [["3", "10"], ["2", "5"], ["3", "10"]]}
    assert OffspringDistribution.from_json(text) == P1DEMO
    path = tmp_path / "d.json"
    path.write_text('{"probs": [["3","10"],["4","10"],["3","10"]]}')
    assert load_distribution(str(path), require_critical=True) == P1DEMO


def test_load_errors(tmp_path):
    with pytest.raises(GWLCError):
        load_distribution("no-such-law")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    with pytest.raises(GWLCError):
        load_distribution(str(bad))
    bad.write_text('{"p": []}')
    with pytest.raises(GWLCError):
        load_distribution(str(bad))


def test_named_laws_are_critical():
    for d in NAMED_DISTRIBUTIONS.values():
        assert d.require_critical().mean == 1


@given(st.integers(1, 20), st.integers(1, 20))
def test_integer_weights(a, b):
    d = OffspringDistribution((Fraction(a, a + b), Fraction(b, a + b)))
    q = d.common_denominator
    assert [Fraction(w, q) for w in d.integer_weights] == list(d.probs)
