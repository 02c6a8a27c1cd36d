"""Exact crash-tolerance thresholds for m&m systems.

The threshold is the largest t such that every pair of (n-t)-sized
process subsets either intersects or is bridged by a common sharing
set.  Two independent routes compute it: a direct quantifier check over
all subset pairs, and a max-min search on a derived bridge graph.  The
test suite holds them equal on random inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .model import Bag, Graph, graph_square, induce_uniform

# Exhaustive pair enumeration is fine at desk scale only.
DIRECT_LIMIT = 14
BRIDGE_LIMIT = 20


class ToleranceError(ValueError):
    """Unusable input or exceeded search budget."""


Witness = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class ToleranceResult:
    """Computed threshold plus, when one exists, a pair of subsets of
    size n-(t+1) each showing that t+1 crashes break the system."""

    t: int
    witness: Witness | None


def lower_bound_floor(n: int) -> int:
    """Majority-intersection floor: every system tolerates this many crashes."""
    if n < 1:
        raise ToleranceError(f"n must be >= 1, got {n}")
    return (n - 1) // 2


def _require_covered(bag: Bag) -> None:
    if not bag.covered():
        raise ToleranceError("bag must cover every process; normalize it first")


def reach_masks(n: int, set_masks: list[int]) -> list[int]:
    """For each 0-based process p: bitmask of p itself plus every process
    co-occurring with p in some set."""
    reach = [1 << i for i in range(n)]
    for mask in set_masks:
        m = mask
        while m:
            low = m & -m
            reach[low.bit_length() - 1] |= mask
            m ^= low
    return reach


def _subset_table(n: int, reach: list[int], size: int):
    """All size-`size` subsets in lexicographic order, as (mask, reach-of-subset)."""
    out = []
    for combo in combinations(range(n), size):
        mask = 0
        r = 0
        for i in combo:
            mask |= 1 << i
            r |= reach[i]
        out.append((mask, r))
    return out


def _all_pairs_ok(n: int, reach: list[int], size: int) -> bool:
    subs = _subset_table(n, reach, size)
    for a in range(len(subs)):
        ra = subs[a][1]
        for b in range(a, len(subs)):  # relation is symmetric
            if not ra & subs[b][0]:
                return False
    return True


def smallest_failing_pair(n: int, reach: list[int], size: int) -> Witness | None:
    """Lexicographically smallest pair of size-`size` subsets that neither
    intersect nor are bridged, or None if every pair is fine."""
    if size < 1 or size > n:
        return None
    combos = list(combinations(range(n), size))
    subs = _subset_table(n, reach, size)
    for a in range(len(subs)):
        ra = subs[a][1]
        for b in range(len(subs)):
            if not ra & subs[b][0]:
                left = tuple(i + 1 for i in combos[a])
                right = tuple(i + 1 for i in combos[b])
                return (left, right)
    return None


def _scan(n: int, reach: list[int]) -> ToleranceResult:
    # The pair condition is monotone in subset size, so the first size
    # that passes gives the threshold.
    for size in range(1, n + 1):
        if _all_pairs_ok(n, reach, size):
            t = n - size
            witness = smallest_failing_pair(n, reach, size - 1)
            assert t >= lower_bound_floor(n)
            return ToleranceResult(t, witness)
    raise AssertionError("size n always passes: identical sets intersect")


def t_direct(bag: Bag, limit: int = DIRECT_LIMIT) -> ToleranceResult:
    """Threshold by exhaustive enumeration of all subset pairs."""
    _require_covered(bag)
    if bag.n > limit:
        raise ToleranceError(f"n={bag.n} exceeds the exhaustive limit {limit}; use t_bridge")
    return _scan(bag.n, reach_masks(bag.n, bag.masks()))


def bridge_graph(bag: Bag) -> Graph:
    """Edge {p,q} iff some set contains both p and q."""
    edges = set()
    for s in bag.sets:
        members = sorted(s)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                edges.add((a, b))
    return Graph(bag.n, frozenset(edges))


def t_bridge(bag: Bag, limit: int = BRIDGE_LIMIT) -> ToleranceResult:
    """Threshold via the bridge graph.

    Finds s*, the largest s for which two disjoint size-s sides exist
    with no bridge edge between them (0 when none), and returns
    t = n - s* - 1.  Enumerates one side over all subsets with a DP for
    the side's closed neighbourhood, so the other side is any subset of
    the untouched remainder.
    """
    _require_covered(bag)
    n = bag.n
    if n > limit:
        raise ToleranceError(f"n={n} exceeds the bridge search budget {limit}")
    reach = reach_masks(n, bag.masks())
    closure = [0] * (1 << n)  # subset -> subset plus all its bridge neighbours
    for mask in range(1, 1 << n):
        low = mask & -mask
        closure[mask] = closure[mask ^ low] | reach[low.bit_length() - 1]
    s_star = 0
    for mask in range(1, 1 << n):
        free = n - closure[mask].bit_count()
        best = min(mask.bit_count(), free)
        if best > s_star:
            s_star = best
    t = n - s_star - 1
    witness = smallest_failing_pair(n, reach, s_star) if s_star >= 1 else None
    return ToleranceResult(t, witness)


def t_uniform(g: Graph, limit: int = DIRECT_LIMIT) -> ToleranceResult:
    """Threshold for the uniform system of a graph, using square-graph
    adjacency as the bridging condition.  Equals t_direct on the induced
    bag."""
    if g.n > limit:
        raise ToleranceError(f"n={g.n} exceeds the exhaustive limit {limit}")
    g2 = graph_square(g)
    reach = [0] * g.n
    for p in range(1, g.n + 1):
        mask = 1 << (p - 1)
        for q in g2.neighbors(p):
            mask |= 1 << (q - 1)
        reach[p - 1] = mask
    return _scan(g.n, reach)


def verify_witness(bag: Bag, t: int, witness: Witness) -> bool:
    """Check a claimed witness for t+1: disjoint size-(n-(t+1)) sides
    with no set meeting both.  O(m*n)."""
    left, right = (set(witness[0]), set(witness[1]))
    size = bag.n - (t + 1)
    if len(left) != size or len(right) != size or left & right:
        return False
    for s in bag.sets:
        if s & left and s & right:
            return False
    return True
