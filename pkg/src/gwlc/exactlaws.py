"""Exact and asymptotic laws for the leaf count of a uniformly random subtree.

Notation: c_l = P(L = l) is the l-th coefficient of the leaf generating
function f; X(t) counts full subtrees with t leaves and V = sum_t X(t) is
the vertex count. All exact quantities are ``Fraction``; the leaf table is
kept in integer-scaled form (see :class:`gwlc.powerseries.ScaledSeries`) so
that l ~ 10^4 stays cheap.

Joint mass convention. A tree with L = t leaves contains a t-leaf subtree
at every vertex of the unary chain hanging from the root, so
E[X(t) 1(L=t)] = c_t / (1 - p_1), not c_t, once p_1 > 0. With that base
case the convolution recursion and the closed form agree and give

    E[X(t) 1(L=l)] = (l-t+1) c_{l-t+1} c_t / p_0,

whose sum over t is [x^l] f f' / p_0 = E[V 1(L=l)] as it must be. The two
forms coincide with the (1-p_1)/p_0 variant when p_1 = 0.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Union

from ._bigint import dot, reduced_fraction
from .errors import EllTooSmallError, GWLCError, OutOfRangeError
from .holonomic import LeafTable
from .offspring import NAMED_DISTRIBUTIONS, OffspringDistribution
from .powerseries import PowerSeries, ScaledSeries

__all__ = [
    "ConditionalLaw",
    "VMoments",
    "LeafAsymptotics",
    "leaf_table",
    "leaf_law",
    "leaf_law_asymptotic",
    "double_factorial",
    "joint_mass",
    "joint_mass_column",
    "expected_subtree_count",
    "expected_vertices_on_event",
    "v_conditional_moments",
    "plugin_conditional_law",
    "ratio_conditional_law",
    "tail_threshold",
    "tail_deficit",
    "binary_subtree_law",
    "binary_conditional_law",
    "binary_mean_leafcount",
]

Mass = Union[Fraction, float]

LAW_KINDS = ("exact-binary", "plugin", "ratio", "oracle-enumeration", "monte-carlo")


class LazyMasses(Mapping):
    """t -> num(t)/den over 1..ell, reduced to lowest terms only on access.

    Reducing ten thousand 100k-bit fractions costs far more than the rest
    of the computation, and most consumers look at a handful of t.
    """

    def __init__(self, ell: int, numerator: Callable[[int], int], denominator: int):
        self.ell = ell
        self._num = numerator
        self._den = denominator
        self._cache: dict[int, Fraction] = {}

    def __getitem__(self, t: int) -> Fraction:
        if not isinstance(t, int) or not 1 <= t <= self.ell:
            raise KeyError(t)
        if t not in self._cache:
            self._cache[t] = reduced_fraction(self._num(t), self._den)
        return self._cache[t]

    def as_float(self, t: int) -> float:
        return self._num(t) / self._den

    def __iter__(self):
        return iter(range(1, self.ell + 1))

    def __len__(self) -> int:
        return self.ell

    def partial_sum(self, upto: int) -> Fraction:
        upto = min(upto, self.ell)
        return reduced_fraction(sum(self._num(t) for t in range(1, upto + 1)), self._den)


@dataclass
class ConditionalLaw:
    """Distribution of the random-subtree leaf count given L = ell.

    ``residual`` is kind specific: for the plug-in main term it is
    ``1 - sum(masses)`` (signed); for an enumeration oracle it is the leaf
    probability not reached under the node cap; exact kinds carry 0.
    """

    ell: int
    masses: Mapping
    kind: str
    residual: Mass = Fraction(0)
    flags: tuple = ()

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise GWLCError(f"unknown law kind {self.kind!r}")

    def mass(self, t: int) -> Mass:
        return self.masses[t] if 1 <= t <= self.ell else Fraction(0)

    def float_mass(self, t: int) -> float:
        if isinstance(self.masses, LazyMasses):
            return self.masses.as_float(t)
        return float(self.mass(t))

    def total(self) -> Mass:
        if isinstance(self.masses, LazyMasses):
            return self.masses.partial_sum(self.ell)
        return sum(self.masses.values(), Fraction(0))

    def mean(self) -> Mass:
        return sum((t * self.mass(t) for t in range(1, self.ell + 1)), Fraction(0))


@dataclass(frozen=True)
class VMoments:
    """Exact conditional moments of the vertex count V given L = ell."""

    ell: int
    mean: Fraction
    second: Fraction
    variance: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "variance", self.second - self.mean * self.mean)


class LeafAsymptotics(NamedTuple):
    double_factorial_form: float
    power_law_form: float


_tables: dict[OffspringDistribution, LeafTable] = {}
_tables_lock = threading.Lock()


def leaf_table(d: OffspringDistribution) -> LeafTable:
    """Shared per-distribution leaf table (created once, extended on demand)."""
    d.require_critical()
    with _tables_lock:
        table = _tables.get(d)
        if table is None:
            table = _tables[d] = LeafTable(d)
    return table


def _scaled_leaf(d: OffspringDistribution, order: int) -> ScaledSeries:
    return leaf_table(d).scaled(order)


def leaf_law(d: OffspringDistribution, ell: int) -> Fraction:
    """P(L = ell), exactly."""
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    return leaf_table(d).prob(ell)


def leaf_series(d: OffspringDistribution, order: int) -> PowerSeries:
    return _scaled_leaf(d, order).to_power_series()


def double_factorial(n: int) -> int:
    """n!! by exact product; (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError("double factorial undefined below -1")
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def leaf_law_asymptotic(d: OffspringDistribution, ell: int) -> LeafAsymptotics:
    """Two real approximations of P(L = ell).

    ``double_factorial_form`` is gamma_series (2l-3)!! / (2^l l!), which is
    asymptotic to gamma_leaf / l^(3/2) and exact for the binary law;
    ``power_law_form`` is gamma_leaf / l^(3/2).
    """
    d.require_critical()
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    ratio = Fraction(double_factorial(2 * ell - 3), 2**ell * math.factorial(ell))
    return LeafAsymptotics(
        d.gamma_series * float(ratio),
        d.gamma_leaf / ell**1.5,
    )


def _check_range(ell: int, t: int) -> None:
    if not 1 <= t <= ell:
        raise OutOfRangeError(f"need 1 <= t <= ell, got t={t}, ell={ell}")


def _joint_closed(d: OffspringDistribution, ell: int, t: int) -> Fraction:
    return (ell - t + 1) * leaf_law(d, ell - t + 1) * leaf_law(d, t) / d.p0


def joint_mass_column(d: OffspringDistribution, t: int, max_ell: int) -> list[Fraction]:
    """E[X(t) 1(L=l)] for l = t..max_ell by the convolution recursion.

    Base E[X(t) 1(L=t)] = c_t/(1-p_1); for l > t,
    (1-p_1) F(l) = sum_{t<=mu<l} F(mu) [x^(l-mu)] (1 - p_0/f').
    """
    d.require_critical()
    _check_range(max_ell, t)
    span = max_ell - t
    f = leaf_series(d, span + 1)
    kernel = 1 - f.derivative().reciprocal().scale(d.p0)
    scale = 1 - d.p1
    column = [leaf_law(d, t) / scale]
    for k in range(1, span + 1):
        acc = sum((column[j] * kernel[k - j] for j in range(k)), Fraction(0))
        column.append(acc / scale)
    return column


def joint_mass(d: OffspringDistribution, ell: int, t: int, mode: str = "closed") -> Fraction:
    """E[X(t) 1(L=ell)] exactly; ``mode`` is ``closed`` or ``recursion``."""
    d.require_critical()
    _check_range(ell, t)
    if mode == "closed":
        return _joint_closed(d, ell, t)
    if mode == "recursion":
        return joint_mass_column(d, t, ell)[ell - t]
    raise GWLCError(f"unknown joint mass mode {mode!r}")


def expected_subtree_count(d: OffspringDistribution, ell: int, t: int) -> Fraction:
    """E[X(t) | L = ell]."""
    return joint_mass(d, ell, t) / leaf_law(d, ell)


def _product_coeff(a: ScaledSeries, b: ScaledSeries, m: int) -> Fraction:
    total = dot(a.nums[: m + 1], b.nums[m::-1])
    return reduced_fraction(total, a.base ** (a.slope * m + a.offset + b.offset))


def expected_vertices_on_event(d: OffspringDistribution, ell: int) -> Fraction:
    """E[V 1(L=ell)] = [x^ell] f f' / p_0."""
    d.require_critical()
    f = _scaled_leaf(d, ell + 1)
    return _product_coeff(f, f.derivative(), ell) / d.p0


def v_conditional_moments(d: OffspringDistribution, ell: int) -> VMoments:
    """Exact E[V | L=ell] and E[V^2 | L=ell] from the univariate identities

        E[V 1(L=l)]      = [x^l] f f' / p0
        E[V(V-1) 1(L=l)] = [x^l] f'' f^2 / p0^2 + 2 [x^l] (f'^2 f / p0^2 - f' f / p0)
    """
    d.require_critical()
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    p0 = d.p0
    f = _scaled_leaf(d, ell + 2)
    f1 = f.derivative()
    f2 = f1.derivative()
    first = _product_coeff(f, f1, ell) / p0
    f_sq = f.truncate(ell) * f.truncate(ell)
    f1_sq = f1.truncate(ell) * f1.truncate(ell)
    factorial_second = (
        _product_coeff(f2, f_sq, ell) / p0**2
        + 2 * (_product_coeff(f1_sq, f, ell) / p0**2 - _product_coeff(f1, f, ell) / p0)
    )
    c = leaf_law(d, ell)
    return VMoments(ell, first / c, (factorial_second + first) / c)


def _pair_numerator(nums, ell: int) -> Callable[[int], int]:
    return lambda t: (ell - t + 1) * nums[ell - t + 1] * nums[t]


def plugin_conditional_law(d: OffspringDistribution, ell: int) -> ConditionalLaw:
    """Main-term approximation with the (1-p_1) factor:

        (1-p_1) (l-t+1) c_{l-t+1} c_t / (l c_l),   1 <= t <= l.

    Not a normalised law; ``residual`` is 1 - sum of masses, signed.
    """
    d.require_critical()
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    table = leaf_table(d)
    table.ensure(ell)
    nums = table.nums
    q = 1 - d.p1
    # c_{l-t+1} c_t / c_l = nums.. / (nums_l * R): the R-powers cancel to one R.
    den = ell * nums[ell] * table.base * q.denominator
    num_t = _pair_numerator(nums, ell)
    masses = LazyMasses(ell, lambda t: q.numerator * num_t(t), den)
    pair_sum = dot(nums[1 : ell + 1], [(ell - t + 1) * nums[ell - t + 1] for t in range(1, ell + 1)])
    residual = 1 - reduced_fraction(q.numerator * pair_sum, den)
    return ConditionalLaw(ell, masses, "plugin", residual)


def ratio_conditional_law(d: OffspringDistribution, ell: int) -> ConditionalLaw:
    """E[X(t) | L=l] / E[V | L=l]: the ratio-of-means law, normalised exactly.

    Equals the true conditional law whenever V is determined by L (p_1 = 0
    and only degrees 0 and 2), and for any law whose reduced form is binary.
    """
    d.require_critical()
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    table = leaf_table(d)
    table.ensure(ell)
    nums = table.nums
    num_t = _pair_numerator(nums, ell)
    den = sum(num_t(t) for t in range(1, ell + 1))
    return ConditionalLaw(ell, LazyMasses(ell, num_t, den), "ratio", Fraction(0))


def tail_threshold(ell: int) -> float:
    """sqrt(l) / ln(l)^2."""
    if ell < 3:
        raise EllTooSmallError("tail threshold needs ell >= 3")
    return math.sqrt(ell) / math.log(ell) ** 2


def tail_deficit(d: OffspringDistribution, ell: int, law: str = "plugin") -> float:
    """1 - sum_{t <= floor(tau)} masses(t), tau = sqrt(l)/ln^2(l).

    With ``law="plugin"`` this is the main-term estimate of
    P(subtree leaves > tau | L = l); ``law="ratio"`` uses the normalised
    ratio-of-means law instead.
    """
    d.require_critical()
    cut = math.floor(tail_threshold(ell))
    if law == "plugin":
        masses = plugin_conditional_law(d, ell).masses
    elif law == "ratio":
        masses = ratio_conditional_law(d, ell).masses
    else:
        raise GWLCError(f"unknown law {law!r}")
    return float(1 - masses.partial_sum(cut))


def binary_subtree_law(ell: int, t: int) -> Fraction:
    """Exact P(subtree leaves = t | L = ell) for p_0 = p_2 = 1/2."""
    _check_range(ell, t)
    return Fraction(
        t * math.comb(ell, t) ** 2,
        ell * (2 * ell - 1) * math.comb(2 * (ell - 1), 2 * (t - 1)),
    )


def binary_conditional_law(ell: int) -> ConditionalLaw:
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    masses = {t: binary_subtree_law(ell, t) for t in range(1, ell + 1)}
    return ConditionalLaw(ell, masses, "exact-binary", Fraction(0))


def binary_mean_leafcount(ell: int) -> tuple[Fraction, float]:
    """Exact E[subtree leaves | L=ell] for the binary law, and sqrt(pi l)/2.

    Uses t P(t) = l/(2l-1) C(2(t-1),t-1) C(2(l-t),l-t) / C(2(l-1),l-1),
    summing the central-binomial products in integers.
    """
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    m = ell - 1
    central = [1]
    for k in range(m):
        central.append(central[-1] * 2 * (2 * k + 1) // (k + 1))
    total = dot(central, central[::-1])
    exact = reduced_fraction(ell * total, (2 * ell - 1) * central[m])
    return exact, math.sqrt(math.pi * ell) / 2


def is_binary(d: OffspringDistribution) -> bool:
    return d == NAMED_DISTRIBUTIONS["binary"]
