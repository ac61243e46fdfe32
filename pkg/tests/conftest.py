from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from gwlc.offspring import NAMED_DISTRIBUTIONS, OffspringDistribution

settings.register_profile(
    "gwlc", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("gwlc")

BINARY = NAMED_DISTRIBUTIONS["binary"]
P1DEMO = NAMED_DISTRIBUTIONS["p1demo"]
TERNARY = NAMED_DISTRIBUTIONS["ternary"]
# critical, with both unary vertices and degree 3
MIXED = OffspringDistribution((Fraction(3, 8), Fraction(3, 8), Fraction(1, 8), Fraction(1, 8)))

TEST_DISTRIBUTIONS = {"binary": BINARY, "p1demo": P1DEMO, "ternary": TERNARY, "mixed": MIXED}


@pytest.fixture(params=sorted(TEST_DISTRIBUTIONS))
def dist(request):
    return TEST_DISTRIBUTIONS[request.param]


def _critical_from_weights(unary: int, upper: list) -> OffspringDistribution:
    # mean 1 and total 1 force a_0 = sum_{j>=2} (j-1) a_j
    a = [sum((j + 2 - 1) * w for j, w in enumerate(upper)), unary, *upper]
    total = sum(a)
    return OffspringDistribution(tuple(Fraction(x, total) for x in a))


def critical_laws(max_degree: int = 4, max_weight: int = 6):
    """Hypothesis strategy: random critical laws with finite support."""
    from hypothesis import strategies as st

    upper = st.lists(st.integers(0, max_weight), min_size=1, max_size=max_degree - 1).filter(any)
    return st.builds(_critical_from_weights, st.integers(0, max_weight), upper)
