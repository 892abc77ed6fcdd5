"""Small exhaustive oracles shared by the tests, independent of the package's solvers."""
import itertools

from korder.graph import WeightedDigraph


def all_paths(g: WeightedDigraph):
    """Every directed path with at least one edge, as edge id tuples (DAGs only)."""
    out = g.out_edges()
    found = []

    def walk(path, v):
        for idx in out[v]:
            nxt = path + (idx,)
            found.append(nxt)
            walk(nxt, g.edges[idx].head)

    for v in range(g.n):
        walk((), v)
    return found


def longest_by_enumeration(g: WeightedDigraph) -> int:
    return max((len(p) for p in all_paths(g)), default=0)


def every_labeling(n: int, k: int):
    return itertools.product(range(1, k + 1), repeat=n)


def forward_sum(g: WeightedDigraph, labels, offsets=None) -> float:
    offsets = offsets or [1] * g.m
    return sum(e.weight for e, o in zip(g.edges, offsets) if labels[e.tail] + o <= labels[e.head])
