"""Ordered rooted trees as preorder out-degree sequences, and their subtree profiles."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import MalformedEncodingError

__all__ = ["GWTree", "SubtreeProfile", "subtree_profile", "is_valid_encoding"]


def is_valid_encoding(degrees: Sequence[int]) -> bool:
    """Lukasiewicz condition: pending count starts at 1, stays positive, ends at 0."""
    pending = 1
    for deg in degrees:
        if deg < 0 or pending <= 0:
            return False
        pending += deg - 1
    return len(degrees) > 0 and pending == 0


@dataclass(frozen=True)
class GWTree:
    """Ordered tree stored as out-degrees in depth-first preorder."""

    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(x) for x in self.degrees))
        if not is_valid_encoding(self.degrees):
            raise MalformedEncodingError(f"not a preorder degree sequence: {self.degrees[:20]}")

    @property
    def vertices(self) -> int:
        return len(self.degrees)

    @property
    def leaves(self) -> int:
        return self.degrees.count(0)

    def __len__(self) -> int:
        return len(self.degrees)


@dataclass(frozen=True)
class SubtreeProfile:
    """L, V and t -> X(t), the number of full subtrees with t leaves."""

    leaves: int
    vertices: int
    counts: dict

    def mass_vector(self) -> dict:
        """t -> X(t)/V, the law of the leaf count of a uniform subtree."""
        v = self.vertices
        return {t: x / v for t, x in sorted(self.counts.items())}


def _leaf_counts(degrees: Sequence[int]) -> list[int]:
    """Leaf count of every vertex's subtree, one explicit-stack pass."""
    n = len(degrees)
    if n == 0:
        raise MalformedEncodingError("empty degree sequence")
    out = [0] * n
    # stack entries: [vertex index, children still to close]
    stack: list[list[int]] = []
    for i, deg in enumerate(degrees):
        if deg < 0:
            raise MalformedEncodingError(f"negative degree at position {i}")
        if i > 0 and not stack:
            raise MalformedEncodingError(f"tree closes before position {i}")
        if deg > 0:
            stack.append([i, deg])
            continue
        out[i] = 1
        leaves = 1
        # hand the closed subtree's leaves to its parent; close parents in turn
        while stack:
            top = stack[-1]
            out[top[0]] += leaves
            top[1] -= 1
            if top[1]:
                break
            leaves = out[top[0]]
            stack.pop()
    if stack:
        raise MalformedEncodingError("degree sequence ends with open vertices")
    return out


def subtree_profile(tree: GWTree | Sequence[int]) -> SubtreeProfile:
    degrees = tree.degrees if isinstance(tree, GWTree) else tuple(tree)
    counts = Counter(_leaf_counts(degrees))
    return SubtreeProfile(
        leaves=sum(1 for x in degrees if x == 0),
        vertices=len(degrees),
        counts=dict(sorted(counts.items())),
    )
