"""Topology of message-and-memory (m&m) systems.

An m&m system couples ordinary message passing over n processes with
pools of shared single-writer registers.  Which processes share which
pool is given by a bag of process subsets; a uniform system derives the
bag from an undirected connection graph, giving each process a pool
shared with its closed neighbourhood.

Process ids are dense 1-based integers.  All types here are immutable
value types and safe to share across concurrent simulations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path


class ModelError(ValueError):
    """Malformed bag, graph, or system spec."""


@dataclass(frozen=True)
class Bag:
    """A bag of non-empty subsets of the process set {1..n}.

    Duplicates and set order are kept: register identities depend on the
    position of a set in the bag, so order is fixed at construction.
    """

    n: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ModelError(f"process count must be >= 1, got {self.n}")
        for idx, s in enumerate(self.sets, start=1):
            if not s:
                raise ModelError(f"set S_{idx} is empty")
            bad = sorted(p for p in s if not (1 <= p <= self.n))
            if bad:
                raise ModelError(
                    f"set S_{idx} mentions processes outside 1..{self.n}: {bad}"
                )

    @property
    def m(self) -> int:
        return len(self.sets)

    def covered(self) -> bool:
        """True iff every process appears in at least one set."""
        seen: set[int] = set()
        for s in self.sets:
            seen |= s
        return len(seen) == self.n

    def masks(self) -> list[int]:
        """Each set as a bitmask over 0-based process indices."""
        return [sum(1 << (p - 1) for p in s) for s in self.sets]


def bag_of(n: int, *sets) -> Bag:
    """Convenience constructor from iterables of process ids."""
    return Bag(n, tuple(frozenset(s) for s in sets))


def normalize_bag(bag: Bag) -> Bag:
    """Extend the bag so every process appears in at least one set.

    Appends a singleton {p} for each uncovered process p, in process
    index order; existing sets are untouched, so spec files round-trip.
    Idempotent.
    """
    seen: set[int] = set()
    for s in bag.sets:
        seen |= s
    extra = tuple(frozenset({p}) for p in range(1, bag.n + 1) if p not in seen)
    if not extra:
        return bag
    return Bag(bag.n, bag.sets + extra)


@dataclass(frozen=True)
class Graph:
    """Undirected graph over processes; edges stored as (u, v) with u < v."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ModelError(f"edge ({u},{v}) outside 1..{self.n}")
            if u >= v:
                raise ModelError(f"edge ({u},{v}) must be ordered u < v (no self-loops)")

    @staticmethod
    def from_edges(n: int, pairs) -> "Graph":
        canon = set()
        for u, v in pairs:
            if u == v:
                raise ModelError(f"self-loop at p{u}")
            canon.add((min(u, v), max(u, v)))
        return Graph(n, frozenset(canon))

    def neighbors(self, p: int) -> frozenset[int]:
        return frozenset(v if u == p else u for u, v in self.edges if p in (u, v))


def induce_uniform(g: Graph) -> Bag:
    """The bag with one set per process: its neighbours plus itself.

    The result always covers every process, since each set contains its
    own process.
    """
    return Bag(g.n, tuple(g.neighbors(p) | {p} for p in range(1, g.n + 1)))


def graph_square(g: Graph) -> Graph:
    """G plus an edge between every pair of nodes at distance two."""
    adj = {p: g.neighbors(p) for p in range(1, g.n + 1)}
    edges = set(g.edges)
    for k in range(1, g.n + 1):
        around = sorted(adj[k])
        for i, u in enumerate(around):
            for v in around[i + 1:]:
                edges.add((u, v))
    return Graph(g.n, frozenset(edges))


# A register identity: (set index i, owner p) with p a member of S_i.
RegisterId = tuple[int, int]


@dataclass(frozen=True)
class SystemSpec:
    """An m&m system: a covered bag, the designated writer, and the
    derived register identities R_i[p] for every p in S_i.

    R_i[p] is writable only by p and readable exactly by the members of
    S_i.  Use :func:`make_spec` to normalize the bag automatically.
    """

    bag: Bag
    writer: int
    graph: Graph | None = None

    def __post_init__(self):
        if not (1 <= self.writer <= self.bag.n):
            raise ModelError(f"writer p{self.writer} outside 1..{self.bag.n}")
        if not self.bag.covered():
            raise ModelError("bag leaves some process without a register; normalize first")

    @property
    def n(self) -> int:
        return self.bag.n

    @cached_property
    def registers(self) -> tuple[RegisterId, ...]:
        return tuple(
            (i, p)
            for i, s in enumerate(self.bag.sets, start=1)
            for p in sorted(s)
        )

    def set_members(self, i: int) -> frozenset[int]:
        return self.bag.sets[i - 1]

    def writable_registers(self, p: int) -> tuple[RegisterId, ...]:
        """Registers p owns, ascending by set index."""
        return tuple((i, p) for i, s in enumerate(self.bag.sets, start=1) if p in s)

    def readable_registers(self, p: int) -> tuple[RegisterId, ...]:
        """Registers p may read, ascending by (set index, owner)."""
        return tuple(
            (i, q)
            for i, s in enumerate(self.bag.sets, start=1)
            if p in s
            for q in sorted(s)
        )


def make_spec(bag: Bag | None = None, graph: Graph | None = None, writer: int = 1) -> SystemSpec:
    """Build a SystemSpec from a bag or a graph, normalizing the bag."""
    if (bag is None) == (graph is None):
        raise ModelError("exactly one of bag/graph must be given")
    if graph is not None:
        bag = induce_uniform(graph)
    return SystemSpec(normalize_bag(bag), writer, graph)


def access_maps(spec: SystemSpec):
    """Materialized access rule: who may read and write each register."""
    readable = {reg: tuple(sorted(spec.set_members(reg[0]))) for reg in spec.registers}
    writable = {reg: reg[1] for reg in spec.registers}
    return readable, writable


def spec_from_dict(d: dict) -> SystemSpec:
    if "bag" in d and "edges" in d:
        raise ModelError('spec file must contain exactly one of "bag"/"edges"')
    try:
        n = int(d["n"])
        writer = int(d["writer"])
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"bad spec file: {e}") from e
    if "bag" in d:
        return make_spec(bag=bag_of(n, *d["bag"]), writer=writer)
    if "edges" in d:
        return make_spec(graph=Graph.from_edges(n, [tuple(e) for e in d["edges"]]), writer=writer)
    raise ModelError('spec file needs a "bag" or "edges" field')


def spec_to_dict(spec: SystemSpec) -> dict:
    if spec.graph is not None:
        return {
            "n": spec.n,
            "edges": [list(e) for e in sorted(spec.graph.edges)],
            "writer": spec.writer,
        }
    return {
        "n": spec.n,
        "bag": [sorted(s) for s in spec.bag.sets],
        "writer": spec.writer,
    }


def load_spec(path) -> SystemSpec:
    with open(Path(path), encoding="utf-8") as f:
        return spec_from_dict(json.load(f))


def dump_spec(spec: SystemSpec, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as f:
        json.dump(spec_to_dict(spec), f)
        f.write("\n")
