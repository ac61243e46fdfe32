"""Brute-force weighted enumeration of ordered trees with a given leaf count.

This is the ground truth for small instances: nothing here uses generating
functions, only the product weight prod_v p_{deg(v)} of each tree.
"""

from __future__ import annotations

import json
from collections import defaultdict
from fractions import Fraction
from typing import IO, Iterator

from .errors import OutOfRangeError
from .exactlaws import ConditionalLaw, leaf_law
from .offspring import OffspringDistribution
from .powerseries import leaf_numerators
from .trees import GWTree, subtree_profile

__all__ = [
    "default_node_cap",
    "enumerate_trees",
    "oracle_conditional_law",
    "oracle_joint_mass",
    "oracle_joint_masses",
    "dump_trees",
]


def default_node_cap(d: OffspringDistribution, ell: int) -> int:
    """2l-1 suffices without unary vertices; otherwise 4l and a nonzero residual."""
    return 2 * ell - 1 if d.p1 == 0 else 4 * ell


def _walk(d: OffspringDistribution, ell: int, node_cap: int) -> Iterator[tuple[tuple, int]]:
    """Yield (degrees, integer weight) in lexicographic order of degrees.

    The weight is prod_v a_{deg(v)} with p_j = a_j/Q; divide by Q^V.
    """
    support = [(j, d.integer_weights[j]) for j in d.support]
    prefix: list[int] = []

    def extend(pending: int, leaves: int, weight: int):
        if pending == 0:
            if leaves == ell:
                yield tuple(prefix), weight
            return
        # every pending vertex still owns at least one leaf and one vertex
        for j, a in support:
            new_pending = pending - 1 + j
            new_leaves = leaves + (j == 0)
            if new_leaves + new_pending > ell or len(prefix) + 1 + new_pending > node_cap:
                continue
            prefix.append(j)
            yield from extend(new_pending, new_leaves, weight * a)
            prefix.pop()

    yield from extend(1, 0, 1)


def enumerate_trees(
    d: OffspringDistribution, ell: int, node_cap: int | None = None
) -> Iterator[tuple[GWTree, Fraction]]:
    """Stream every tree with ``ell`` leaves and at most ``node_cap`` vertices."""
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    node_cap = default_node_cap(d, ell) if node_cap is None else node_cap
    q = d.common_denominator
    for degrees, w in _walk(d, ell, node_cap):
        yield GWTree(degrees), Fraction(w, q ** len(degrees))


def _exact_leaf_prob(d: OffspringDistribution, ell: int) -> Fraction:
    if d.criticality:
        return leaf_law(d, ell)
    return leaf_numerators(d, ell).coeff(ell)


def oracle_conditional_law(
    d: OffspringDistribution,
    ell: int,
    node_cap: int | None = None,
    residual_threshold: Fraction | float | None = None,
) -> ConditionalLaw:
    """E[X(t)/V | L = ell] as a literal weighted sum over enumerated trees.

    Masses are normalised by the enumerated weight; ``residual`` is the
    leaf probability missed because of the node cap.
    """
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    node_cap = default_node_cap(d, ell) if node_cap is None else node_cap
    q = d.common_denominator
    # Group by vertex count so each weight shares the denominator V * Q^V.
    by_size: dict[int, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    weight_by_size: dict[int, int] = defaultdict(int)
    for degrees, w in _walk(d, ell, node_cap):
        v = len(degrees)
        weight_by_size[v] += w
        acc = by_size[v]
        for t, x in subtree_profile(degrees).counts.items():
            acc[t] += w * x

    total = sum((Fraction(w, q**v) for v, w in weight_by_size.items()), Fraction(0))
    residual = _exact_leaf_prob(d, ell) - total
    masses = {}
    for t in range(1, ell + 1):
        s = sum(
            (Fraction(acc.get(t, 0), v * q**v) for v, acc in by_size.items()),
            Fraction(0),
        )
        masses[t] = s / total if total else Fraction(0)
    flags = ()
    if residual_threshold is not None and residual > residual_threshold:
        flags = ("residual-too-large",)
    return ConditionalLaw(ell, masses, "oracle-enumeration", residual, flags)


def oracle_joint_mass(
    d: OffspringDistribution, ell: int, t: int, node_cap: int | None = None
) -> tuple[Fraction, Fraction]:
    """(sum over trees of weight * X(t), leaf probability missed by the cap)."""
    if not 1 <= t <= ell:
        raise OutOfRangeError(f"need 1 <= t <= ell, got t={t}, ell={ell}")
    node_cap = default_node_cap(d, ell) if node_cap is None else node_cap
    q = d.common_denominator
    mass = Fraction(0)
    total = Fraction(0)
    for degrees, w in _walk(d, ell, node_cap):
        weight = Fraction(w, q ** len(degrees))
        total += weight
        mass += weight * subtree_profile(degrees).counts.get(t, 0)
    return mass, _exact_leaf_prob(d, ell) - total


def oracle_joint_masses(
    d: OffspringDistribution, ell: int, node_cap: int | None = None
) -> tuple[dict[int, Fraction], Fraction]:
    """All t at once: ({t: sum of weight * X(t)}, residual), one enumeration pass."""
    if ell < 1:
        raise OutOfRangeError("ell must be >= 1")
    node_cap = default_node_cap(d, ell) if node_cap is None else node_cap
    q = d.common_denominator
    by_size: dict[int, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    weight_by_size: dict[int, int] = defaultdict(int)
    for degrees, w in _walk(d, ell, node_cap):
        v = len(degrees)
        weight_by_size[v] += w
        for t, x in subtree_profile(degrees).counts.items():
            by_size[v][t] += w * x
    total = sum((Fraction(w, q**v) for v, w in weight_by_size.items()), Fraction(0))
    masses = {
        t: sum((Fraction(acc.get(t, 0), q**v) for v, acc in by_size.items()), Fraction(0))
        for t in range(1, ell + 1)
    }
    return masses, _exact_leaf_prob(d, ell) - total


def dump_trees(d: OffspringDistribution, ell: int, node_cap: int | None, fh: IO[str]) -> int:
    """Write one JSON line per tree: degree sequence and weight. Returns the count."""
    n = 0
    for tree, weight in enumerate_trees(d, ell, node_cap):
        fh.write(json.dumps({"degrees": list(tree.degrees), "weight": str(weight)}) + "\n")
        n += 1
    return n
