"""Linear recurrences for leaf probabilities, for exact tables at large l.

The quadratic coefficient recursion is fine up to a few thousand terms but
l ~ 10^4 needs something linear. Writing y = f(x), the fixed point says
x = psi(y) := (y - phi(y)) / p0 with phi(y) = sum_{j>=1} p_j y^j, so every
derivative of f is a rational function of y alone:

    f^(k) = N_k(y) / psi'(y)^(2k-1),  N_1 = 1,
    N_{k+1} = N_k' psi' - (2k-1) N_k psi''.

An inhomogeneous linear ODE  sum_k a_k(x) f^(k) = b(x)  with polynomial
coefficients is then a polynomial identity in y once x is replaced by
psi(y); the unknown coefficients of a_k and b span a nullspace computed
exactly over Q. The ODE turns into a recurrence for c_l = [x^l] f, which
runs on the integer numerators b_l = c_l R^(2l-1) with exact division.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp

from .errors import GWLCError
from .offspring import OffspringDistribution
from ._bigint import reduced_fraction
from .powerseries import ScaledSeries, leaf_numerators

__all__ = ["LeafRecurrence", "derive_leaf_recurrence", "LeafTable"]


@dataclass(frozen=True)
class LeafRecurrence:
    """sum_s P_s(n) c_{n+s} = beta_n for all n >= 0 (c at negative index is 0).

    ``shift_polys`` maps s to the coefficient list of P_s (ascending powers
    of n); ``rhs`` lists beta_0..beta_deg, zero afterwards.
    """

    ode_order: int
    ode_degree: int
    shift_polys: dict
    rhs: tuple
    start: int  # first index the recurrence may produce (leading poly nonzero beyond)

    @property
    def top_shift(self) -> int:
        return max(self.shift_polys)

    @property
    def low_shift(self) -> int:
        return min(self.shift_polys)

    def poly_at(self, s: int, n: int) -> Fraction:
        return sum((c * n**i for i, c in enumerate(self.shift_polys[s])), Fraction(0))

    def beta(self, n: int) -> Fraction:
        return self.rhs[n] if n < len(self.rhs) else Fraction(0)

    def residual(self, coeffs, n: int) -> Fraction:
        """Left minus right side at index n, for checking against known terms."""
        total = Fraction(0)
        for s in self.shift_polys:
            m = n + s
            if m >= 0:
                total += self.poly_at(s, n) * coeffs[m]
        return total - self.beta(n)


def _rising_poly(n, i: int, k: int):
    expr = sp.Integer(1)
    for u in range(1, k + 1):
        expr *= n - i + u
    return expr


def derive_leaf_recurrence(d: OffspringDistribution, max_order: int | None = None,
                           max_degree: int | None = None) -> LeafRecurrence:
    """Find a polynomial-coefficient ODE for f and convert it to a recurrence."""
    d.require_critical()
    y, n = sp.symbols("y n")
    p0 = sp.Rational(d.p0.numerator, d.p0.denominator)
    phi = sum(sp.Rational(p.numerator, p.denominator) * y**j
              for j, p in enumerate(d.probs) if j >= 1)
    psi = sp.expand((y - phi) / p0)
    dpsi = sp.diff(psi, y)
    ddpsi = sp.diff(dpsi, y)
    top = d.max_degree
    max_order = max_order or top
    max_degree = max_degree if max_degree is not None else 2 * top + 2

    numerators = [None, sp.Integer(1)]
    for k in range(1, max_order):
        nk = numerators[k]
        numerators.append(sp.expand(sp.diff(nk, y) * dpsi - (2 * k - 1) * nk * ddpsi))

    psi_pows = [sp.Integer(1)]
    for _ in range(max_degree):
        psi_pows.append(sp.expand(psi_pows[-1] * psi))

    for r in range(1, max_order + 1):
        # Column templates, already multiplied through by psi'^(2r-1).
        base = [sp.expand(y * dpsi ** (2 * r - 1))]
        base += [sp.expand(numerators[k] * dpsi ** (2 * r - 2 * k)) for k in range(1, r + 1)]
        inhom = sp.expand(dpsi ** (2 * r - 1))
        for deg in range(max_degree + 1):
            labels, columns = [], []
            for k in range(r + 1):
                for i in range(deg + 1):
                    labels.append(("a", k, i))
                    columns.append(sp.expand(psi_pows[i] * base[k]))
            for i in range(deg + 1):
                labels.append(("b", 0, i))
                columns.append(sp.expand(-psi_pows[i] * inhom))
            polys = [sp.Poly(c, y) for c in columns]
            height = max(p.degree() for p in polys) + 1
            matrix = sp.Matrix(height, len(polys),
                               lambda row, col: polys[col].coeff_monomial(y**row))
            for vec in matrix.nullspace():
                if any(vec[j] != 0 for j, lab in enumerate(labels) if lab[0] == "a" and lab[1] >= 1):
                    return _to_recurrence(labels, vec, r, deg, n)
    raise GWLCError(f"no ODE of order <= {max_order}, degree <= {max_degree} found for {d}")


def _to_recurrence(labels, vec, r: int, deg: int, n) -> LeafRecurrence:
    scale = sp.ilcm(*[sp.fraction(v)[1] for v in vec])
    vec = [v * scale for v in vec]
    shift_exprs: dict[int, sp.Expr] = {}
    rhs = [Fraction(0)] * (deg + 1)
    for (kind, k, i), coef in zip(labels, vec):
        if coef == 0:
            continue
        if kind == "b":
            rhs[i] = Fraction(int(coef))
            continue
        # [x^n] x^i f^(k) = (n-i+1)...(n-i+k) c_{n-i+k}
        s = k - i
        shift_exprs[s] = shift_exprs.get(s, sp.Integer(0)) + coef * _rising_poly(n, i, k)
    shift_polys = {}
    for s, expr in shift_exprs.items():
        poly = sp.Poly(sp.expand(expr), n)
        if poly.is_zero:
            continue
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
        shift_polys[s] = tuple(coeffs)
    if not shift_polys:
        raise GWLCError("degenerate ODE: no shift survives")
    lead = shift_polys[max(shift_polys)]
    # Cauchy bound on the roots of the leading polynomial.
    if len(lead) > 1:
        bound = 1 + max(abs(c / lead[-1]) for c in lead[:-1])
        start = max(shift_polys) + math.ceil(bound) + 1
    else:
        start = max(shift_polys)
    start = max(start, max(shift_polys) + len(rhs) + 1, 2)
    return LeafRecurrence(r, deg, shift_polys, tuple(rhs), start)


@dataclass
class LeafTable:
    """Growable table of exact leaf probabilities for one critical law.

    Entries are held as integer numerators of P(L=l) * R^(2l-1); the first
    terms come from the quadratic recursion, the rest from the derived
    recurrence. Extension is guarded by a lock so concurrent readers see
    either the old or the new complete table.
    """

    dist: OffspringDistribution
    nums: list = field(default_factory=list)
    recurrence: LeafRecurrence | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.dist.require_critical()
        a = self.dist.integer_weights
        self.base = self.dist.common_denominator - (a[1] if len(a) > 1 else 0)

    def ensure(self, order: int) -> None:
        if len(self.nums) > order:
            return
        with self._lock:
            if len(self.nums) > order:
                return
            if self.recurrence is None:
                self.recurrence = derive_leaf_recurrence(self.dist)
            rec = self.recurrence
            if not self.nums:
                seed = leaf_numerators(self.dist, max(rec.start + 4, 8))
                nums = list(seed.nums)
                coeffs = [seed.coeff(m) for m in range(len(nums))]
                for k in range(len(nums) - rec.top_shift):
                    if rec.residual(coeffs, k) != 0:
                        raise GWLCError(f"derived recurrence fails at n={k} for {self.dist}")
            else:
                nums = list(self.nums)
            self._extend(nums, order)
            self.nums = nums

    def _extend(self, nums: list, order: int) -> None:
        rec = self.recurrence
        top, low = rec.top_shift, rec.low_shift
        big_r = self.base
        shifts = sorted(s for s in rec.shift_polys if s != top)
        while len(nums) <= order:
            m = len(nums)
            k = m - top
            values = {s: rec.poly_at(s, k) for s in rec.shift_polys}
            den = math.lcm(*(v.denominator for v in values.values()))
            lead = int(values[top] * den)
            if lead == 0:
                raise GWLCError(f"recurrence leading coefficient vanishes at n={k}")
            acc = 0
            for s in shifts:
                idx = k + s
                if idx < 0 or idx < k + low:
                    continue
                w = int(values[s] * den)
                if w:
                    acc -= w * nums[idx] * big_r ** (2 * (top - s))
            beta = rec.beta(k)
            if beta:
                extra = beta * den * Fraction(big_r) ** (2 * m - 1)
                if extra.denominator != 1:
                    raise GWLCError("inhomogeneous term is not integral after scaling")
                acc += int(extra)
            q, rem = divmod(acc, lead)
            if rem:
                raise GWLCError(f"non-integral leaf numerator at l={m}")
            nums.append(q)

    def scaled(self, order: int) -> ScaledSeries:
        self.ensure(order)
        return ScaledSeries(tuple(self.nums[: order + 1]), self.base, 2, -1)

    def numerator(self, ell: int) -> int:
        self.ensure(ell)
        return self.nums[ell]

    def prob(self, ell: int) -> Fraction:
        if ell < 1:
            return Fraction(0)
        self.ensure(ell)
        return reduced_fraction(self.nums[ell], self.base ** (2 * ell - 1))
