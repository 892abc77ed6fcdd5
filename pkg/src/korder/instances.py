"""Instance generators and the line-oriented text formats.

Formats (one record per line, ``#`` starts a comment)::

    p maxk <n> <m> <k>          p ded <n> <m> <k>
    e <tail> <head> <weight>    (m lines)

    p rmas <n> <m>
    l <v> <label> [<label> ...] (n lines)
    e <tail> <head> <weight> <offset>   (m lines)

Weights are written with 17 significant digits so text round-trips floats
exactly. Random generators draw from numpy's PCG64 bit generator.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Edge, GraphError, WeightedDigraph
from .rmas import RmasInstance

RNG_NAME = "numpy.random.PCG64"


class InstanceFormatError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class OrderingInstance:
    """A Max-k-Ordering or DED(k) instance: a graph plus its ``k``."""

    kind: str
    g: WeightedDigraph
    k: int


def rng_for(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def complete_digraph(n: int) -> WeightedDigraph:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return WeightedDigraph(n, tuple(Edge(u, v, 1.0) for u in range(n) for v in range(n) if u != v))


def path_graph(k: int, weights=None) -> WeightedDigraph:
    """Directed path ``0 -> 1 -> ... -> k`` with k edges."""
    weights = [1.0] * k if weights is None else [float(w) for w in weights]
    return WeightedDigraph(k + 1, tuple(Edge(i, i + 1, weights[i]) for i in range(k)))


def sampled_sparse(n: int, m: int, seed) -> WeightedDigraph:
    """Sample ``m`` ordered pairs with replacement; weight = multiplicity.

    Edges are listed in ``(tail, head)`` order and the weights sum to ``m``.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = rng_for(seed)
    draws = rng.integers(0, n * (n - 1), size=m)
    counts = np.bincount(draws, minlength=n * (n - 1))
    edges = []
    for code in np.flatnonzero(counts):
        u, r = divmod(int(code), n - 1)
        v = r if r < u else r + 1
        edges.append(Edge(u, v, float(counts[code])))
    return WeightedDigraph(n, tuple(edges))


def _weights(rng: np.random.Generator, count: int, max_weight: int | None) -> list[float]:
    if max_weight is None:
        return [1.0] * count
    return [float(w) for w in rng.integers(1, max_weight + 1, size=count)]


def random_dag(n: int, p: float, seed, max_weight: int | None = None) -> WeightedDigraph:
    """Each pair ``i < j`` gets the edge ``i -> j`` with probability ``p``."""
    rng = rng_for(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = rng.random(len(pairs)) < p
    chosen = [pr for pr, kp in zip(pairs, keep) if kp]
    ws = _weights(rng, len(chosen), max_weight)
    return WeightedDigraph(n, tuple(Edge(u, v, w) for (u, v), w in zip(chosen, ws)))


def random_dag_edges(n: int, m: int, seed, max_weight: int | None = None) -> WeightedDigraph:
    """Exactly ``m`` distinct forward pairs ``i -> j`` (``i < j``)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if m > len(pairs):
        raise ValueError(f"a DAG on {n} vertices has at most {len(pairs)} simple edges")
    rng = rng_for(seed)
    sel = np.sort(rng.choice(len(pairs), size=m, replace=False))
    ws = _weights(rng, m, max_weight)
    return WeightedDigraph(n, tuple(Edge(*pairs[i], w) for i, w in zip(sel, ws)))


def random_digraph(n: int, m: int, seed, max_weight: int | None = None) -> WeightedDigraph:
    """``m`` distinct ordered pairs chosen uniformly, in sampled order."""
    total = n * (n - 1)
    if m > total:
        raise ValueError(f"at most {total} distinct edges on {n} vertices")
    rng = rng_for(seed)
    codes = rng.choice(total, size=m, replace=False)
    ws = _weights(rng, m, max_weight)
    edges = []
    for code, w in zip(codes, ws):
        u, r = divmod(int(code), n - 1)
        edges.append(Edge(u, r if r < u else r + 1, w))
    return WeightedDigraph(n, tuple(edges))


def random_rmas(n: int, m: int, max_label: int, max_offset: int, seed,
                max_set_size: int | None = None, max_weight: int | None = None) -> RmasInstance:
    """Random OffsetRMAS instance over labels ``1..max_label``."""
    rng = rng_for(seed)
    g = random_digraph(n, m, int(rng.integers(2**63 - 1)), max_weight)
    size_cap = max_label if max_set_size is None else min(max_set_size, max_label)
    sets = []
    for _ in range(n):
        size = int(rng.integers(1, size_cap + 1))
        sets.append(tuple(sorted(int(a) for a in rng.choice(np.arange(1, max_label + 1), size=size, replace=False))))
    offsets = tuple(int(o) for o in rng.integers(1, max_offset + 1, size=m))
    return RmasInstance(g, tuple(sets), offsets)


def _fmt_weight(w: float) -> str:
    return format(w, ".17g")


def emit(instance, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    if isinstance(instance, RmasInstance):
        g = instance.g
        lines.append(f"p rmas {g.n} {g.m}")
        for v, s in enumerate(instance.label_sets):
            lines.append(f"l {v} " + " ".join(str(a) for a in s))
        for e, o in zip(g.edges, instance.offsets):
            lines.append(f"e {e.tail} {e.head} {_fmt_weight(e.weight)} {o}")
    elif isinstance(instance, OrderingInstance):
        g = instance.g
        lines.append(f"p {instance.kind} {g.n} {g.m} {instance.k}")
        for e in g.edges:
            lines.append(f"e {e.tail} {e.head} {_fmt_weight(e.weight)}")
    else:
        raise TypeError(f"cannot emit {type(instance).__name__}")
    return "\n".join(lines) + "\n"


def _int(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceFormatError(line, f"{what} must be an integer, got {tok!r}") from None


def _float(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InstanceFormatError(line, f"weight must be a number, got {tok!r}") from None


def parse(source, kind: str | None = None):
    """Parse instance text, or a file when ``source`` is a path object."""
    if isinstance(source, os.PathLike):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    header = None
    n = m = k = 0
    edges: list[Edge] = []
    offsets: list[int] = []
    label_sets: dict[int, tuple[int, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if header is None:
            if tok[0] != "p" or len(tok) < 2:
                raise InstanceFormatError(lineno, "expected a 'p' header line")
            header = tok[1]
            if header not in ("maxk", "ded", "rmas"):
                raise InstanceFormatError(lineno, f"unknown problem kind {header!r}")
            if kind is not None and kind != header:
                raise InstanceFormatError(lineno, f"expected a {kind} instance, found {header}")
            want = 4 if header == "rmas" else 5
            if len(tok) != want:
                raise InstanceFormatError(lineno, f"malformed header: expected {want} fields, got {len(tok)}")
            n = _int(tok[2], lineno, "vertex count")
            m = _int(tok[3], lineno, "edge count")
            if n < 0 or m < 0:
                raise InstanceFormatError(lineno, "counts must be non-negative")
            if header != "rmas":
                k = _int(tok[4], lineno, "k")
                if k < 1:
                    raise InstanceFormatError(lineno, f"k must be positive, got {k}")
            continue
        rec = tok[0]
        if rec == "l":
            if header != "rmas":
                raise InstanceFormatError(lineno, "label lines only appear in rmas instances")
            if len(tok) < 2:
                raise InstanceFormatError(lineno, "label line needs a vertex id")
            v = _int(tok[1], lineno, "vertex id")
            if not 0 <= v < n:
                raise InstanceFormatError(lineno, f"vertex id {v} out of range 0..{n - 1}")
            if v in label_sets:
                raise InstanceFormatError(lineno, f"duplicate label set for vertex {v}")
            labels = tuple(_int(t, lineno, "label") for t in tok[2:])
            if not labels:
                raise InstanceFormatError(lineno, f"empty label set for vertex {v}")
            if min(labels) < 1:
                raise InstanceFormatError(lineno, "labels must be positive integers")
            label_sets[v] = tuple(sorted(set(labels)))
        elif rec == "e":
            want = 5 if header == "rmas" else 4
            if len(tok) != want:
                raise InstanceFormatError(lineno, f"edge line needs {want - 1} fields")
            u = _int(tok[1], lineno, "tail")
            v = _int(tok[2], lineno, "head")
            for x in (u, v):
                if not 0 <= x < n:
                    raise InstanceFormatError(lineno, f"vertex id {x} out of range 0..{n - 1}")
            if u == v:
                raise InstanceFormatError(lineno, f"self-loop on vertex {u}")
            w = _float(tok[3], lineno)
            if not w >= 0:
                raise InstanceFormatError(lineno, f"negative weight {tok[3]}")
            if header == "rmas":
                o = _int(tok[4], lineno, "offset")
                if o < 1:
                    raise InstanceFormatError(lineno, f"offset {o} is below 1")
                offsets.append(o)
            edges.append(Edge(u, v, w))
        else:
            raise InstanceFormatError(lineno, f"unknown record type {rec!r}")
    last = len(text.splitlines())
    if header is None:
        raise InstanceFormatError(max(last, 1), "missing 'p' header")
    if len(edges) != m:
        raise InstanceFormatError(last, f"header declares {m} edges, found {len(edges)}")
    try:
        g = WeightedDigraph(n, tuple(edges))
    except GraphError as exc:
        raise InstanceFormatError(last, str(exc)) from None
    if header != "rmas":
        return OrderingInstance(header, g, k)
    missing = [v for v in range(n) if v not in label_sets]
    if missing:
        raise InstanceFormatError(last, f"no label line for vertices {missing}")
    inst = RmasInstance(g, tuple(label_sets[v] for v in range(n)), tuple(offsets))
    universe = inst.universe
    if universe:
        span = universe[-1] - universe[0] + 1
        big = [i for i, o in enumerate(offsets) if o > span]
        if big:
            warnings.warn(f"offsets of edges {big} exceed the label span {span}; those edges are unsatisfiable",
                          stacklevel=2)
    return inst
