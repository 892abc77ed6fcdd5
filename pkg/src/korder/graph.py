"""Weighted digraphs and the structural primitives shared by every solver.

Vertices are dense ids ``0..n-1``. Edges keep their insertion order and are
addressed by position, so parallel edges stay distinct.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


class GraphError(ValueError):
    """Malformed graph data (self-loop, negative weight, bad vertex id)."""


class CyclicGraphError(ValueError):
    """An operation that needs a DAG received a graph with a directed cycle."""

    def __init__(self, cycle: Sequence[int]):
        self.cycle = list(cycle)
        super().__init__(f"graph contains a directed cycle: {self.cycle}")


class NotOrderableError(ValueError):
    """Raised by :func:`greedy_k_labeling` with the offending cycle or path."""

    def __init__(self, message: str, certificate: Sequence[int]):
        self.certificate = list(certificate)
        super().__init__(f"{message}: {self.certificate}")


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    weight: float = 1.0


@dataclass(frozen=True)
class WeightedDigraph:
    n: int
    edges: tuple[Edge, ...] = ()
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"vertex count must be non-negative, got {self.n}")
        edges = tuple(e if isinstance(e, Edge) else Edge(int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0)
                      for e in self.edges)
        for idx, e in enumerate(edges):
            if not (0 <= e.tail < self.n and 0 <= e.head < self.n):
                raise GraphError(f"edge {idx} ({e.tail}, {e.head}) has a vertex outside 0..{self.n - 1}")
            if e.tail == e.head:
                raise GraphError(f"edge {idx} is a self-loop on vertex {e.tail}")
            if not e.weight >= 0:
                raise GraphError(f"edge {idx} has negative or NaN weight {e.weight}")
        object.__setattr__(self, "edges", edges)
        if self.names is not None and len(self.names) != self.n:
            raise GraphError("name table length must equal n")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "WeightedDigraph":
        """Build from ``(tail, head)`` or ``(tail, head, weight)`` tuples."""
        return cls(n, tuple(edges))

    @classmethod
    def from_named_edges(cls, edges: Iterable[tuple]) -> "WeightedDigraph":
        """Build from edges over arbitrary hashable vertex names.

        Names are assigned ids in order of first appearance and kept in
        ``names``.
        """
        ids: dict = {}
        triples = []
        for e in edges:
            for name in e[:2]:
                ids.setdefault(name, len(ids))
            w = float(e[2]) if len(e) > 2 else 1.0
            triples.append(Edge(ids[e[0]], ids[e[1]], w))
        return cls(len(ids), tuple(triples), names=tuple(str(k) for k in ids))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def tails(self) -> np.ndarray:
        return np.fromiter((e.tail for e in self.edges), dtype=np.int64, count=self.m)

    @property
    def heads(self) -> np.ndarray:
        return np.fromiter((e.head for e in self.edges), dtype=np.int64, count=self.m)

    @property
    def weights(self) -> np.ndarray:
        return np.fromiter((e.weight for e in self.edges), dtype=float, count=self.m)

    def total_weight(self) -> float:
        return float(sum(e.weight for e in self.edges))

    def in_edges(self) -> list[list[int]]:
        """Per-vertex lists of incoming edge ids."""
        res: list[list[int]] = [[] for _ in range(self.n)]
        for idx, e in enumerate(self.edges):
            res[e.head].append(idx)
        return res

    def out_edges(self) -> list[list[int]]:
        res: list[list[int]] = [[] for _ in range(self.n)]
        for idx, e in enumerate(self.edges):
            res[e.tail].append(idx)
        return res

    def subgraph_without(self, removed: Iterable[int]) -> "WeightedDigraph":
        """Same vertex set, with the given edge ids dropped."""
        gone = set(removed)
        return WeightedDigraph(self.n, tuple(e for i, e in enumerate(self.edges) if i not in gone), self.names)


Labeling = Mapping[int, int] | Sequence[int]


def topological_order(g: WeightedDigraph, active: Sequence[bool] | None = None) -> list[int] | None:
    """Kahn's algorithm with a lowest-id-first queue; ``None`` on a cycle.

    ``active`` optionally masks edges by id.
    """
    indeg = [0] * g.n
    succ: list[list[int]] = [[] for _ in range(g.n)]
    for idx, e in enumerate(g.edges):
        if active is not None and not active[idx]:
            continue
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    heap = [v for v in range(g.n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return order if len(order) == g.n else None


def find_cycle(g: WeightedDigraph) -> list[int] | None:
    """Return the vertices of some directed cycle, or ``None``."""
    succ: list[list[int]] = [[] for _ in range(g.n)]
    for e in g.edges:
        succ[e.tail].append(e.head)
    color = [0] * g.n
    parent = [-1] * g.n
    for root in range(g.n):
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(succ[w])))
                    break
                if color[w] == 1:
                    cycle = [v]
                    while cycle[-1] != w:
                        cycle.append(parent[cycle[-1]])
                    return cycle[::-1]
            else:
                color[v] = 2
                stack.pop()
    return None


def is_acyclic(g: WeightedDigraph) -> bool:
    return topological_order(g) is not None


def _require_order(g: WeightedDigraph) -> list[int]:
    order = topological_order(g)
    if order is None:
        raise CyclicGraphError(find_cycle(g) or [])
    return order


def path_depths(g: WeightedDigraph) -> tuple[list[int], list[int]]:
    """Longest-path edge counts ``t_v`` ending at each vertex, with parent edge ids.

    Parent is ``-1`` for vertices with ``t_v = 0``. Raises
    :class:`CyclicGraphError` on cyclic input.
    """
    order = _require_order(g)
    incoming = g.in_edges()
    depth = [0] * g.n
    parent = [-1] * g.n
    for v in order:
        for idx in incoming[v]:
            u = g.edges[idx].tail
            if depth[u] + 1 > depth[v]:
                depth[v] = depth[u] + 1
                parent[v] = idx
    return depth, parent


def longest_path_length(g: WeightedDigraph) -> int:
    """Edge count of the longest directed path in a DAG."""
    depth, _ = path_depths(g)
    return max(depth, default=0)


def longest_path(g: WeightedDigraph) -> list[int]:
    """Vertex sequence of one longest path (a single vertex when edgeless)."""
    depth, parent = path_depths(g)
    if g.n == 0:
        return []
    v = max(range(g.n), key=lambda u: (depth[u], -u))
    path = [v]
    while parent[path[-1]] >= 0:
        path.append(g.edges[parent[path[-1]]].tail)
    return path[::-1]


def check_k_orderable(g: WeightedDigraph, k: int) -> bool:
    """True iff some labeling into ``1..k`` makes every edge forward."""
    if not is_acyclic(g):
        return False
    return longest_path_length(g) <= k - 1


def greedy_k_labeling(g: WeightedDigraph, k: int) -> list[int]:
    """Label each vertex with one more than the longest path ending at it.

    On failure the certificate is a vertex sequence: the offending cycle or
    a path with at least ``k`` edges.
    """
    cycle = find_cycle(g)
    if cycle is not None:
        raise NotOrderableError("graph has a directed cycle", [g.edges[e].tail for e in cycle])
    depth, _ = path_depths(g)
    if max(depth, default=0) > k - 1:
        path = longest_path(g)
        raise NotOrderableError(f"graph has a path with {len(path) - 1} >= {k} edges", path)
    return [t + 1 for t in depth]


def forward_weight(g: WeightedDigraph, labeling: Labeling, offsets: Sequence[int] | None = None) -> float:
    """Total weight of edges ``(u, v)`` with ``label(u) + offset <= label(v)``.

    Offsets default to 1, i.e. a strict ``label(u) < label(v)``.
    """
    total = 0.0
    for idx, e in enumerate(g.edges):
        o = 1 if offsets is None else offsets[idx]
        if labeling[e.tail] + o <= labeling[e.head]:
            total += e.weight
    return total


def has_path_of_length(g: WeightedDigraph, k: int) -> bool:
    return longest_path_length(g) >= k
