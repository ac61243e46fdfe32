"""Galton-Watson tree sampling and rejection estimates of the subtree leaf law.

Random streams are Philox (counter based): worker ``i`` of a run seeded with
``s`` draws from ``SeedSequence(s, spawn_key=(i,))`` and nothing else, so a
run is fully determined by ``(seed, workers)`` whatever the scheduling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import OutOfRangeError, ZeroAcceptedError
from .exactlaws import ConditionalLaw, leaf_law
from .offspring import OffspringDistribution
from .powerseries import leaf_numerators
from .trees import GWTree, _leaf_counts

logger = logging.getLogger(__name__)

__all__ = [
    "Overflow",
    "DegreeSampler",
    "ConditionalEstimate",
    "RejectionRun",
    "make_generator",
    "sample_tree",
    "sample_trees",
    "rejection_sample",
    "mc_conditional_law",
    "estimates_to_law",
]

DEFAULT_NODE_CAP = 10**6
BLOCK = 4096


@dataclass(frozen=True)
class Overflow:
    """A sample discarded because it grew past the node cap."""

    nodes: int


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


class DegreeSampler:
    """I.i.d. out-degrees by inversion of a cumulative table built once.

    Uniforms are drawn in blocks; the buffer is consumed left to right so
    the degree sequence depends only on the generator state.
    """

    def __init__(self, d: OffspringDistribution, generator: np.random.Generator,
                 block: int = BLOCK):
        cdf = np.cumsum([float(p) for p in d.probs])
        cdf[-1] = 1.0
        self.cdf = cdf
        self.generator = generator
        self.block = block
        self.buf: list[int] = []
        self.pos = 0

    def refill(self) -> list[int]:
        u = self.generator.random(self.block)
        self.buf = np.searchsorted(self.cdf, u, side="right").tolist()
        self.pos = 0
        return self.buf


def _grow(sampler: DegreeSampler, node_cap: int, max_leaves: int | None):
    """Depth-first growth; returns (status, degrees) with status in
    {"done", "overflow", "too-many-leaves"}."""
    buf, pos, end = sampler.buf, sampler.pos, len(sampler.buf)
    degrees: list[int] = []
    append = degrees.append
    pending, leaves, nodes = 1, 0, 0
    limit = max_leaves if max_leaves is not None else math.inf
    status = "done"
    while pending:
        if pos == end:
            buf = sampler.refill()
            pos, end = 0, len(buf)
        j = buf[pos]
        pos += 1
        append(j)
        nodes += 1
        pending += j - 1
        if j == 0:
            leaves += 1
        # each pending vertex still contributes at least one leaf
        if leaves + pending > limit:
            status = "too-many-leaves"
            break
        if nodes > node_cap:
            status = "overflow"
            break
    sampler.pos = pos
    return status, degrees


def sample_tree(d: OffspringDistribution, rng, node_cap: int = DEFAULT_NODE_CAP,
                max_leaves: int | None = None):
    """One extinction tree, an :class:`Overflow`, or ``None`` when growth was
    stopped because the leaf count provably exceeds ``max_leaves``.

    ``rng`` is a :class:`DegreeSampler` (efficient, buffered) or a numpy
    ``Generator`` (a fresh small buffer is used per call).
    """
    if node_cap < 1:
        raise OutOfRangeError("node_cap must be >= 1")
    sampler = rng if isinstance(rng, DegreeSampler) else DegreeSampler(d, rng, block=64)
    status, degrees = _grow(sampler, node_cap, max_leaves)
    if status == "overflow":
        return Overflow(len(degrees))
    if status == "too-many-leaves":
        return None
    return GWTree(tuple(degrees))


def sample_trees(d: OffspringDistribution, n: int, seed: int,
                 node_cap: int = DEFAULT_NODE_CAP) -> Iterator[GWTree | Overflow]:
    sampler = DegreeSampler(d, make_generator(seed))
    for _ in range(n):
        yield sample_tree(d, sampler, node_cap)


@dataclass(frozen=True)
class ConditionalEstimate:
    ell: int
    t: int
    point: float
    stderr: float
    accepted: int
    trials: int
    overflowed: int
    seed: int


@dataclass
class RejectionRun:
    """Merged outcome of a rejection-sampling run."""

    dist: OffspringDistribution
    ell: int
    seed: int
    workers: int
    node_cap: int
    accepted: int
    trials: int
    overflowed: int
    mass_sums: list
    mass_sqsums: list
    v_sum: int
    v_sqsum: int
    estimates: list = field(init=False)

    def __post_init__(self):
        n = self.accepted
        self.estimates = []
        for t in range(1, self.ell + 1):
            s, ss = self.mass_sums[t], self.mass_sqsums[t]
            point = s / n if n else math.nan
            if n > 1:
                var = max(ss - n * point * point, 0.0) / (n - 1)
                stderr = math.sqrt(var / n)
            else:
                stderr = math.nan if n == 0 else 0.0
            self.estimates.append(ConditionalEstimate(
                self.ell, t, point, stderr, n, self.trials, self.overflowed, self.seed))

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.trials if self.trials else math.nan

    @property
    def acceptance_stderr(self) -> float:
        p = self.acceptance_rate
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else math.nan

    @property
    def v_mean(self) -> float:
        return self.v_sum / self.accepted

    @property
    def v_stderr(self) -> float:
        n = self.accepted
        if n < 2:
            return 0.0
        mean = self.v_mean
        var = max(self.v_sqsum - n * mean * mean, 0.0) / (n - 1)
        return math.sqrt(var / n)


def _leaf_probability(d: OffspringDistribution, ell: int) -> Fraction:
    if d.criticality:
        return leaf_law(d, ell)
    return leaf_numerators(d, ell).coeff(ell)


def _worker(probs, ell, target, max_trials, node_cap, seed, index, block):
    d = OffspringDistribution(probs)
    sampler = DegreeSampler(d, make_generator(seed, index), block)
    sums = [0.0] * (ell + 1)
    sqsums = [0.0] * (ell + 1)
    accepted = trials = overflowed = 0
    v_sum = v_sqsum = 0
    while accepted < target and trials < max_trials:
        trials += 1
        status, degrees = _grow(sampler, node_cap, ell)
        if status == "overflow":
            overflowed += 1
            continue
        if status != "done" or degrees.count(0) != ell:
            continue
        accepted += 1
        v = len(degrees)
        v_sum += v
        v_sqsum += v * v
        counts = [0] * (ell + 1)
        for c in _leaf_counts(degrees):
            counts[c] += 1
        for t in range(1, ell + 1):
            x = counts[t]
            if x:
                m = x / v
                sums[t] += m
                sqsums[t] += m * m
    return accepted, trials, overflowed, sums, sqsums, v_sum, v_sqsum


def rejection_sample(
    d: OffspringDistribution,
    ell: int,
    target_accepted: int,
    seed: int,
    node_cap: int = DEFAULT_NODE_CAP,
    workers: int = 1,
    budget_factor: float = 20.0,
    block: int = BLOCK,
) -> RejectionRun:
    """Sample unconditioned trees until ``target_accepted`` have L = ell.

    Growth stops as soon as the leaf count provably exceeds ``ell`` (exact
    rejection, no bias). For p_1 = 0 the node cap is lowered to 2*ell - 1,
    which no accepted tree can exceed. The trial budget is
    ``budget_factor * target / P(L = ell)``.
    """
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    if target_accepted < 1:
        raise OutOfRangeError("target_accepted must be >= 1")
    workers = max(1, int(workers))
    if d.p1 == 0:
        node_cap = min(node_cap, 2 * ell - 1)
    p_ell = _leaf_probability(d, ell)
    if p_ell == 0:
        raise ZeroAcceptedError(f"P(L={ell}) = 0: no tree can be accepted")
    shares = [target_accepted // workers + (i < target_accepted % workers) for i in range(workers)]
    jobs = [
        (d.probs, ell, k, math.ceil(budget_factor * max(k, 1) / float(p_ell)), node_cap, seed, i, block)
        for i, k in enumerate(shares)
    ]
    if workers == 1:
        results = [_worker(*jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, *zip(*jobs)))

    accepted = trials = overflowed = v_sum = v_sqsum = 0
    sums = [0.0] * (ell + 1)
    sqsums = [0.0] * (ell + 1)
    for acc, tr, ov, s, ss, vs, vss in results:  # worker-index order
        accepted += acc
        trials += tr
        overflowed += ov
        v_sum += vs
        v_sqsum += vss
        for t in range(ell + 1):
            sums[t] += s[t]
            sqsums[t] += ss[t]
    if accepted == 0:
        raise ZeroAcceptedError(f"no tree with L={ell} in {trials} trials")
    if accepted < target_accepted:
        logger.warning("trial budget exhausted: %d of %d accepted", accepted, target_accepted)
    if overflowed:
        logger.info("%d of %d trials overflowed node cap %d", overflowed, trials, node_cap)
    return RejectionRun(d, ell, seed, workers, node_cap, accepted, trials, overflowed,
                        sums, sqsums, v_sum, v_sqsum)


def mc_conditional_law(
    d: OffspringDistribution,
    ell: int,
    target_accepted: int,
    seed: int,
    node_cap: int = DEFAULT_NODE_CAP,
    workers: int = 1,
    budget_factor: float = 20.0,
) -> list[ConditionalEstimate]:
    """Estimates of P(subtree leaves = t | L = ell), t = 1..ell, with error bars."""
    return rejection_sample(d, ell, target_accepted, seed, node_cap, workers,
                            budget_factor).estimates


def estimates_to_law(estimates: list[ConditionalEstimate]) -> ConditionalLaw:
    ell = estimates[0].ell
    masses = {e.t: e.point for e in estimates}
    return ConditionalLaw(ell, masses, "monte-carlo", 1.0 - math.fsum(masses.values()))
