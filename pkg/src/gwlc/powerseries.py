"""Truncated power series over exact rationals and the leaf generating function.

Every series carries its truncation order explicitly: products keep the
smaller order, derivatives lose one, and nothing beyond the order is ever
claimed.
"""

from __future__ import annotations

import json
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

from ._bigint import convolve, fraction_parts, parse_fraction, reduced_fraction
from .errors import GWLCError, OrderTooSmallError, ZeroConstantTermError
from .offspring import OffspringDistribution

Scalar = Union[Fraction, int]

__all__ = [
    "PowerSeries",
    "ScaledSeries",
    "IdentityReport",
    "series_arith",
    "series_derivative",
    "series_reciprocal",
    "solve_leaf_series",
    "leaf_numerators",
    "check_gf_identities",
    "verify_gf_identities",
    "series_to_json",
    "series_from_json",
]


def _common_denominator(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    return [c.numerator * (den // c.denominator) for c in coeffs], den


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients c_0..c_order of a series truncated after x^order."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise GWLCError("a series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs, order: int | None = None) -> "PowerSeries":
        coeffs = [Fraction(c) for c in coeffs]
        if order is not None:
            coeffs = (coeffs + [Fraction(0)] * (order + 1))[: order + 1]
        return cls(tuple(coeffs))

    @classmethod
    def constant(cls, value: Scalar, order: int) -> "PowerSeries":
        return cls.from_coeffs([value], order)

    @classmethod
    def monomial(cls, power: int, order: int, coeff: Scalar = 1) -> "PowerSeries":
        coeffs = [Fraction(0)] * (order + 1)
        if power <= order:
            coeffs[power] = Fraction(coeff)
        return cls(tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            raise IndexError("negative coefficient index")
        if k > self.order:
            raise IndexError(f"coefficient x^{k} is beyond truncation order {self.order}")
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise OrderTooSmallError(f"cannot extend order {self.order} to {order}")
        return PowerSeries(self.coeffs[: order + 1])

    def _coerce(self, other) -> "PowerSeries | None":
        if isinstance(other, PowerSeries):
            return other
        if isinstance(other, Rational):
            return PowerSeries.constant(other, self.order)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return PowerSeries(tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Rational):
            return self.scale(other)
        if not isinstance(other, PowerSeries):
            return NotImplemented
        n = min(self.order, other.order)
        an, ad = _common_denominator(self.coeffs[: n + 1])
        bn, bd = _common_denominator(other.coeffs[: n + 1])
        den = ad * bd
        return PowerSeries(tuple(Fraction(c, den) for c in convolve(an, bn, n + 1)))

    __rmul__ = __mul__

    def scale(self, k: Scalar) -> "PowerSeries":
        k = Fraction(k)
        return PowerSeries(tuple(k * c for c in self.coeffs))

    def __pow__(self, exponent: int) -> "PowerSeries":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = PowerSeries.constant(1, self.order)
        for _ in range(exponent):
            result = result * self
        return result

    def derivative(self) -> "PowerSeries":
        return series_derivative(self)

    def reciprocal(self) -> "PowerSeries":
        return series_reciprocal(self)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def first_mismatch(self, other: "PowerSeries") -> int | None:
        """Lowest index where the two series differ, over their common order."""
        for k, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return k
        return None

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if self.order >= 6 else ""
        return f"PowerSeries(order={self.order}, [{shown}{more}])"


def series_arith(a: PowerSeries, b: PowerSeries | Scalar, kind: str) -> PowerSeries:
    """Dispatch ``add``/``sub``/``mul``/``scale``; orders combine by min."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "scale":
        if not isinstance(b, Rational):
            raise GWLCError("scale needs a rational scalar")
        return a.scale(b)
    raise GWLCError(f"unknown series operation {kind!r}")


def series_derivative(a: PowerSeries) -> PowerSeries:
    if a.order < 1:
        raise OrderTooSmallError("derivative needs order >= 1")
    return PowerSeries(tuple((s + 1) * a.coeffs[s + 1] for s in range(a.order)))


def series_reciprocal(a: PowerSeries) -> PowerSeries:
    """1/a through a's order; requires a nonzero constant term."""
    a0 = a.coeffs[0]
    if a0 == 0:
        raise ZeroConstantTermError("reciprocal needs a nonzero constant term")
    # Integer form: with a_k = A_k/den, 1/a has coefficients den*beta_n/A_0^(n+1),
    # beta_0 = 1, beta_n = -sum_{k>=1} A_k A_0^(k-1) beta_{n-k}.
    nums, den = _common_denominator(a.coeffs)
    head = nums[0]
    weights = [0] + [nums[k] * head ** (k - 1) for k in range(1, len(nums))]
    beta = [1]
    for n in range(1, a.order + 1):
        beta.append(-sum(map(operator.mul, weights[1 : n + 1], reversed(beta))))
    return PowerSeries(tuple(Fraction(den * b, head ** (n + 1)) for n, b in enumerate(beta)))


@dataclass(frozen=True)
class ScaledSeries:
    """Series whose m-th coefficient is ``nums[m] / base**(slope*m + offset)``.

    The leaf generating function has this shape with ``base = Q - a_1``
    (``p_j = a_j/Q``), ``slope = 2`` and ``offset = -1``: every coefficient
    arithmetic step then stays inside the integers and the cost of gcd
    normalisation is paid once, on extraction.
    """

    nums: tuple[int, ...]
    base: int
    slope: int = 2
    offset: int = -1

    @property
    def order(self) -> int:
        return len(self.nums) - 1

    def coeff(self, m: int) -> Fraction:
        if m > self.order:
            raise IndexError(f"coefficient x^{m} is beyond truncation order {self.order}")
        e = self.slope * m + self.offset
        n = self.nums[m]
        if n == 0:
            return Fraction(0)
        if e >= 0:
            return reduced_fraction(n, self.base**e)
        return Fraction(n * self.base ** (-e))

    def __getitem__(self, m: int) -> Fraction:
        return self.coeff(m)

    def derivative(self) -> "ScaledSeries":
        if self.order < 1:
            raise OrderTooSmallError("derivative needs order >= 1")
        nums = tuple((m + 1) * self.nums[m + 1] for m in range(self.order))
        return ScaledSeries(nums, self.base, self.slope, self.offset + self.slope)

    def __mul__(self, other: "ScaledSeries") -> "ScaledSeries":
        if not isinstance(other, ScaledSeries):
            return NotImplemented
        if (self.base, self.slope) != (other.base, other.slope):
            raise GWLCError("scaled series must share base and slope")
        n = min(self.order, other.order) + 1
        return ScaledSeries(
            tuple(convolve(self.nums, other.nums, n)),
            self.base,
            self.slope,
            self.offset + other.offset,
        )

    def truncate(self, order: int) -> "ScaledSeries":
        if order > self.order:
            raise OrderTooSmallError(f"cannot extend order {self.order} to {order}")
        return ScaledSeries(self.nums[: order + 1], self.base, self.slope, self.offset)

    def to_power_series(self) -> PowerSeries:
        return PowerSeries(tuple(self.coeff(m) for m in range(len(self.nums))))


def leaf_numerators(d: OffspringDistribution, order: int) -> ScaledSeries:
    """Integer form of the leaf generating function through ``order``.

    Runs the coefficient recursion (1-p_1) c_l = [x^l] sum_{j>=2} p_j f^j
    (+ p_0 at l = 1) on b_l = c_l * R**(2l-1), which is always an integer:
    b_1 = a_0 and b_l = sum_j a_j R^(j-2) [x^l](sum b_m x^m)^j. Powers are
    memoised per j; cost O(D * order^2) integer products. No criticality
    check: subcritical laws satisfy the same fixed point.
    """
    a = d.integer_weights
    big_r = d.common_denominator - (a[1] if len(a) > 1 else 0)
    top = len(a) - 1
    b = [0] * (order + 1)
    # powers[j][m] = [x^m] (sum b x)^j, for j = 2..top
    powers = {j: [0] * (order + 1) for j in range(2, top + 1)}
    for ell in range(1, order + 1):
        for j in range(2, top + 1):
            prev = b if j == 2 else powers[j - 1]
            powers[j][ell] = sum(map(operator.mul, b[1:ell], reversed(prev[1:ell])))
        total = a[0] if ell == 1 else 0
        for j in range(2, top + 1):
            if a[j]:
                total += a[j] * big_r ** (j - 2) * powers[j][ell]
        b[ell] = total
    return ScaledSeries(tuple(b), big_r, 2, -1)


def solve_leaf_series(d: OffspringDistribution, order: int) -> PowerSeries:
    """f(x) = E[x^L] through x^order; coefficient l is P(L = l) exactly."""
    d.require_critical()
    if order < 1:
        raise OrderTooSmallError("leaf series needs order >= 1")
    return leaf_numerators(d, order).to_power_series()


def compose_polynomial(weights: Sequence[Fraction], s: PowerSeries) -> PowerSeries:
    """sum_k weights[k] * s^k by Horner's rule."""
    result = PowerSeries.constant(0, s.order)
    for w in reversed(weights):
        result = result * s + w
    return result


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of checking the two derivative identities of the fixed point.

    ``checked_through`` is the highest coefficient index both sides of every
    identity are defined at; ``mismatches`` maps identity name to the first
    differing index (``None`` when the sides agree).
    """

    checked_through: int
    mismatches: dict

    @property
    def agree(self) -> bool:
        return all(v is None for v in self.mismatches.values())

    @property
    def first_mismatch(self) -> int | None:
        found = [v for v in self.mismatches.values() if v is not None]
        return min(found) if found else None


def check_gf_identities(d: OffspringDistribution, f: PowerSeries) -> IdentityReport:
    """Compare both sides of

        sum_j j p_j f^(j-1)      = 1 - p_0 / f'
        sum_j j(j-1) p_j f^(j-2) = p_0 f'' / f'^3

    for an arbitrary candidate ``f`` (tampered inputs must fail).
    """
    if f.order < 3:
        raise OrderTooSmallError("identity check needs order >= 3")
    probs = d.probs
    p0 = d.p0
    fp = f.derivative()
    fpp = fp.derivative()
    inv = fp.reciprocal()

    lhs1 = compose_polynomial([j * probs[j] for j in range(1, len(probs))], f)
    rhs1 = 1 - inv.scale(p0)
    lhs2 = compose_polynomial([j * (j - 1) * probs[j] for j in range(2, len(probs))], f)
    rhs2 = (fpp * inv * inv * inv).scale(p0)

    through = fpp.order
    return IdentityReport(
        checked_through=through,
        mismatches={
            "first_derivative": lhs1.truncate(through).first_mismatch(rhs1.truncate(through)),
            "second_derivative": lhs2.truncate(through).first_mismatch(rhs2.truncate(through)),
        },
    )


def verify_gf_identities(d: OffspringDistribution, order: int) -> IdentityReport:
    if order < 3:
        raise OrderTooSmallError("identity check needs order >= 3")
    return check_gf_identities(d, solve_leaf_series(d, order))


def fixed_point_rhs(d: OffspringDistribution, f: PowerSeries) -> PowerSeries:
    """sum_{j>=1} p_j f^j + p_0 x, truncated to f's order."""
    weights = [Fraction(0)] + list(d.probs[1:])
    return compose_polynomial(weights, f) + PowerSeries.monomial(1, f.order, d.p0)


def series_to_json(s: PowerSeries) -> str:
    return json.dumps([list(fraction_parts(c)) for c in s.coeffs])


def series_from_json(text: str) -> PowerSeries:
    return PowerSeries(tuple(parse_fraction(n, m) for n, m in json.loads(text)))
