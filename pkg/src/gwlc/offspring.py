"""Finite-support offspring laws with exact rational probabilities."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import (
    DegenerateUnaryError,
    GWLCError,
    NegativeProbabilityError,
    NotCriticalError,
    SumNotOneError,
    ZeroExtinctionError,
)

RationalLike = Union[Fraction, int, str, Sequence]

__all__ = [
    "OffspringDistribution",
    "validate_offspring",
    "reduce_distribution",
    "to_fraction",
    "load_distribution",
    "NAMED_DISTRIBUTIONS",
]


def to_fraction(value: RationalLike) -> Fraction:
    """Convert a user supplied number to an exact rational.

    Accepts ``Fraction``/``int``, a ``[num, den]`` pair (ints or decimal
    strings), or a string such as ``"3/10"`` or ``"0.3"``. Decimal literals
    are read exactly (``"0.3"`` is 3/10, not the nearest binary float).
    Floats are refused because their exact value is rarely what was meant.
    """
    if isinstance(value, bool):
        raise GWLCError(f"not a probability: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise GWLCError(f"cannot parse rational {value!r}") from exc
    if isinstance(value, float):
        raise GWLCError(
            f"float {value!r} given; pass a string or [num, den] pair for exactness"
        )
    if isinstance(value, Sequence) and len(value) == 2:
        num, den = (to_fraction(v) for v in value)
        if den == 0:
            raise GWLCError(f"zero denominator in {value!r}")
        return num / den
    raise GWLCError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class OffspringDistribution:
    """Offspring law p_0..p_D held as exact rationals (index = out-degree).

    Construction validates the probability axioms, ``p_0 > 0`` and
    ``p_1 < 1``; criticality is recorded but only demanded by
    :func:`validate_offspring` and the exact-law routines.
    """

    probs: tuple[Fraction, ...]
    mean: Fraction = field(init=False, compare=False)
    variance: Fraction = field(init=False, compare=False)
    gamma_leaf: float = field(init=False, compare=False, repr=False)
    gamma_series: float = field(init=False, compare=False, repr=False)
    criticality: bool = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        probs = [to_fraction(p) for p in self.probs]
        if not probs:
            raise GWLCError("empty offspring distribution")
        if any(p < 0 for p in probs):
            raise NegativeProbabilityError(f"negative probability in {probs}")
        while len(probs) > 1 and probs[-1] == 0:
            probs.pop()
        total = sum(probs, Fraction(0))
        if total != 1:
            raise SumNotOneError(f"probabilities sum to {total}, not 1")
        if probs[0] == 0:
            raise ZeroExtinctionError("p0 must be positive")
        if len(probs) > 1 and probs[1] == 1:
            raise DegenerateUnaryError("p1 = 1 gives an infinite unary chain")

        mean = sum((j * p for j, p in enumerate(probs)), Fraction(0))
        second = sum((j * j * p for j, p in enumerate(probs)), Fraction(0))
        variance = second - mean * mean
        object.__setattr__(self, "probs", tuple(probs))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", variance)
        object.__setattr__(self, "criticality", mean == 1)
        if variance > 0:
            p0 = probs[0]
            # Two distinct constants; gamma_series = 2*sqrt(pi)*gamma_leaf.
            gl = math.sqrt(p0 / (2 * math.pi * variance))
            gs = math.sqrt(2 * p0 / variance)
        else:
            gl = gs = math.nan
        object.__setattr__(self, "gamma_leaf", gl)
        object.__setattr__(self, "gamma_series", gs)

    @property
    def max_degree(self) -> int:
        return len(self.probs) - 1

    def p(self, j: int) -> Fraction:
        """Probability of out-degree ``j`` (zero outside the support)."""
        if 0 <= j < len(self.probs):
            return self.probs[j]
        return Fraction(0)

    @property
    def p0(self) -> Fraction:
        return self.probs[0]

    @property
    def p1(self) -> Fraction:
        return self.p(1)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, p in enumerate(self.probs) if p > 0)

    @property
    def regime(self) -> str:
        if self.mean == 1:
            return "critical"
        return "subcritical" if self.mean < 1 else "supercritical"

    @property
    def subcritical(self) -> bool:
        return self.mean < 1

    @cached_property
    def common_denominator(self) -> int:
        return math.lcm(*(p.denominator for p in self.probs))

    @cached_property
    def integer_weights(self) -> tuple[int, ...]:
        """Numerators a_j with p_j = a_j / common_denominator."""
        q = self.common_denominator
        return tuple(int(p * q) for p in self.probs)

    def require_critical(self) -> "OffspringDistribution":
        if not self.criticality:
            raise NotCriticalError(f"offspring mean is {self.mean}, not 1")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {"probs": [[str(p.numerator), str(p.denominator)] for p in self.probs]}
        )

    @classmethod
    def from_json(cls, text: str, require_critical: bool = False) -> "OffspringDistribution":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GWLCError(f"invalid distribution JSON: {exc}") from exc
        if not isinstance(payload, dict) or "probs" not in payload:
            raise GWLCError('distribution JSON must be an object with a "probs" array')
        return validate_offspring(payload["probs"], require_critical=require_critical)

    def __str__(self) -> str:
        return "[" + ", ".join(str(p) for p in self.probs) + "]"


def validate_offspring(
    probs: Iterable[RationalLike], require_critical: bool = False
) -> OffspringDistribution:
    """Build an :class:`OffspringDistribution`, optionally insisting on mean 1."""
    d = OffspringDistribution(tuple(to_fraction(p) for p in probs))
    if require_critical:
        d.require_critical()
    return d


def reduce_distribution(d: OffspringDistribution) -> OffspringDistribution:
    """Remove unary vertices: p'_1 = 0 and p'_j = p_j / (1 - p_1) otherwise.

    The leaf count of the resulting extinction tree has the same law as for
    ``d``. Idempotent, and preserves criticality.
    """
    p1 = d.p1
    if p1 == 1:
        raise DegenerateUnaryError("p1 = 1 cannot be reduced")
    scale = 1 - p1
    return OffspringDistribution(
        tuple(Fraction(0) if j == 1 else p / scale for j, p in enumerate(d.probs))
    )


NAMED_DISTRIBUTIONS = {
    "binary": OffspringDistribution((Fraction(1, 2), Fraction(0), Fraction(1, 2))),
    "p1demo": OffspringDistribution((Fraction(3, 10), Fraction(4, 10), Fraction(3, 10))),
    "ternary": OffspringDistribution(
        (Fraction(3, 5), Fraction(0), Fraction(1, 5), Fraction(1, 5))
    ),
}


def load_distribution(source: str, require_critical: bool = False) -> OffspringDistribution:
    """Resolve a built-in name or read a JSON descriptor file."""
    if source in NAMED_DISTRIBUTIONS:
        d = NAMED_DISTRIBUTIONS[source]
        if require_critical:
            d.require_critical()
        return d
    path = Path(source)
    if not path.exists():
        raise GWLCError(
            f"unknown distribution {source!r}: not a built-in name "
            f"({', '.join(NAMED_DISTRIBUTIONS)}) nor an existing file"
        )
    return OffspringDistribution.from_json(path.read_text(), require_critical)
