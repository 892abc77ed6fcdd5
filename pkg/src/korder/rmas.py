"""OffsetRMAS: ordering with per-vertex label sets and per-edge offsets.

An edge ``(u, v)`` with offset ``o`` is satisfied when
``label(u) + o <= label(v)``. Plain RMAS is the all-ones offset case, and
Max-k-Ordering is RMAS with every label set equal to ``{1..k}``.

Labels are handled through a compacted universe: the sorted distinct labels
appearing in any set, addressed by position.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import lp as lpmod
from .graph import WeightedDigraph, forward_weight
from .maxk import EdgeGuarantee

OFFSET_ROUNDING_FACTOR = (1 + 1 / math.sqrt(2)) / 4


@dataclass(frozen=True)
class RmasInstance:
    g: WeightedDigraph
    label_sets: tuple[tuple[int, ...], ...]
    offsets: tuple[int, ...]

    def __post_init__(self):
        sets = tuple(tuple(sorted(set(int(a) for a in s))) for s in self.label_sets)
        if len(sets) != self.g.n:
            raise ValueError(f"expected {self.g.n} label sets, got {len(sets)}")
        for v, s in enumerate(sets):
            if not s:
                raise ValueError(f"label set of vertex {v} is empty")
            if s[0] < 1:
                raise ValueError(f"label set of vertex {v} contains a non-positive label")
        offsets = tuple(int(o) for o in self.offsets)
        if len(offsets) != self.g.m:
            raise ValueError(f"expected {self.g.m} offsets, got {len(offsets)}")
        for i, o in enumerate(offsets):
            if o < 1:
                raise ValueError(f"offset of edge {i} is {o}; offsets must be >= 1")
        object.__setattr__(self, "label_sets", sets)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def from_maxk(cls, g: WeightedDigraph, k: int) -> "RmasInstance":
        return cls(g, tuple(tuple(range(1, k + 1)) for _ in range(g.n)), (1,) * g.m)

    @property
    def universe(self) -> tuple[int, ...]:
        return tuple(sorted(set().union(*self.label_sets))) if self.label_sets else ()

    def lmin(self, v: int) -> int:
        return self.label_sets[v][0]

    def lmax(self, v: int) -> int:
        return self.label_sets[v][-1]

    def satisfiable(self, e: int) -> bool:
        edge = self.g.edges[e]
        return self.lmin(edge.tail) + self.offsets[e] <= self.lmax(edge.head)

    def value(self, labels: Sequence[int]) -> float:
        for v, a in enumerate(labels):
            if a not in self.label_sets[v]:
                raise ValueError(f"label {a} not allowed at vertex {v}")
        return forward_weight(self.g, labels, self.offsets)


@dataclass(frozen=True)
class RmasIndex:
    n: int
    m: int
    universe: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.universe)

    def x(self, v: int, a: int) -> int:
        return v * self.size + a

    def y(self, e: int, a: int, b: int) -> int:
        u = self.size
        return self.n * u + e * u * u + a * u + b

    @property
    def num_vars(self) -> int:
        u = self.size
        return self.n * u + self.m * u * u


@dataclass(frozen=True)
class FractionalRmasSolution:
    instance: RmasInstance
    universe: tuple[int, ...]
    x: np.ndarray  # (n, |universe|)
    y: np.ndarray  # (m, |universe|, |universe|)
    objective: float

    def satisfied_mask(self, e: int) -> np.ndarray:
        lab = np.asarray(self.universe)
        return lab[:, None] + self.instance.offsets[e] <= lab[None, :]

    @property
    def z(self) -> np.ndarray:
        return np.array([(self.y[e] * self.satisfied_mask(e)).sum() for e in range(self.y.shape[0])])

    def check(self, tol: float = 1e-6) -> None:
        inst = self.instance
        assert np.all(np.abs(self.x.sum(axis=1) - 1) <= tol), "vertex marginals do not sum to 1"
        for v, s in enumerate(inst.label_sets):
            outside = [a for a, lab in enumerate(self.universe) if lab not in s]
            assert np.all(self.x[v, outside] <= 1e-9), f"vertex {v} puts mass outside its label set"
        for e, edge in enumerate(inst.g.edges):
            assert np.all(np.abs(self.y[e].sum(axis=1) - self.x[edge.tail]) <= tol)
            assert np.all(np.abs(self.y[e].sum(axis=0) - self.x[edge.head]) <= tol)


def preprocess(inst: RmasInstance) -> tuple[RmasInstance, list[int]]:
    """Drop edges that no labeling can satisfy; returns removed edge ids."""
    removed = [e for e in range(inst.g.m) if not inst.satisfiable(e)]
    if not removed:
        return inst, []
    dropped = set(removed)
    keep = [e for e in range(inst.g.m) if e not in dropped]
    g = WeightedDigraph(inst.g.n, tuple(inst.g.edges[e] for e in keep), inst.g.names)
    return RmasInstance(g, inst.label_sets, tuple(inst.offsets[e] for e in keep)), removed


def satisfiable_weight(inst: RmasInstance) -> float:
    return float(sum(inst.g.edges[e].weight for e in range(inst.g.m) if inst.satisfiable(e)))


def build_rmas_lp(inst: RmasInstance) -> tuple[lpmod.LinearProgram, RmasIndex]:
    universe = inst.universe
    idx = RmasIndex(inst.g.n, inst.g.m, universe)
    U, nv = idx.size, idx.num_vars
    lab = np.asarray(universe)
    obj = np.zeros(nv)
    for e, edge in enumerate(inst.g.edges):
        mask = (lab[:, None] + inst.offsets[e] <= lab[None, :]).ravel()
        base = idx.y(e, 0, 0)
        obj[base:base + U * U] = edge.weight * mask
    cons = []
    for v, s in enumerate(inst.label_sets):
        vec = np.zeros(nv)
        vec[idx.x(v, 0):idx.x(v, 0) + U] = 1.0
        cons.append(lpmod.Constraint(vec, "=", 1.0))
        for a, label in enumerate(universe):
            if label not in s:
                vec = np.zeros(nv)
                vec[idx.x(v, a)] = 1.0
                cons.append(lpmod.Constraint(vec, "=", 0.0))
    for e, edge in enumerate(inst.g.edges):
        base = idx.y(e, 0, 0)
        for a in range(U):
            vec = np.zeros(nv)
            vec[base + a * U:base + (a + 1) * U] = 1.0
            vec[idx.x(edge.tail, a)] = -1.0
            cons.append(lpmod.Constraint(vec, "=", 0.0))
        for b in range(U):
            vec = np.zeros(nv)
            vec[base + b:base + U * U:U] = 1.0
            vec[idx.x(edge.head, b)] = -1.0
            cons.append(lpmod.Constraint(vec, "=", 0.0))
    return lpmod.LinearProgram("max", obj, tuple(cons)), idx


def solve_rmas_lp(inst: RmasInstance) -> FractionalRmasSolution:
    prog, idx = build_rmas_lp(inst)
    res = lpmod.solve(prog)
    if not res.optimal:
        raise lpmod.LpError(f"OffsetRMAS relaxation reported {res.status}")
    U = idx.size
    x = res.x[:inst.g.n * U].reshape(inst.g.n, U)
    y = res.x[inst.g.n * U:].reshape(inst.g.m, U, U)
    return FractionalRmasSolution(inst, idx.universe, x, y, res.objective)


def _allowed(inst: RmasInstance, universe: Sequence[int]) -> np.ndarray:
    return np.array([[lab in s for lab in universe] for s in inst.label_sets], dtype=bool).reshape(inst.g.n, len(universe))


def extreme_boost_distribution(sol: FractionalRmasSolution) -> np.ndarray:
    """Per-vertex label probabilities over the universe.

    Extreme labels of ``S_v`` get ``1/4 + x/2``, interior ones ``x/2``.
    Vertices with a single allowed label take it with probability one.
    """
    inst, universe = sol.instance, sol.universe
    allowed = _allowed(inst, universe)
    x = np.where(allowed, np.clip(sol.x, 0.0, None), 0.0)
    sums = x.sum(axis=1, keepdims=True)
    x = x / np.where(sums > 0, sums, 1.0)
    pos = {lab: a for a, lab in enumerate(universe)}
    probs = x / 2.0
    for v, s in enumerate(inst.label_sets):
        if len(s) == 1:
            probs[v] = 0.0
            probs[v, pos[s[0]]] = 1.0
        else:
            probs[v, pos[s[0]]] += 0.25
            probs[v, pos[s[-1]]] += 0.25
    return probs


def minmax_distribution(inst: RmasInstance, universe: Sequence[int] | None = None) -> np.ndarray:
    """Fair coin between the smallest and largest allowed label of each vertex."""
    universe = inst.universe if universe is None else tuple(universe)
    pos = {lab: a for a, lab in enumerate(universe)}
    probs = np.zeros((inst.g.n, len(universe)))
    for v in range(inst.g.n):
        probs[v, pos[inst.lmin(v)]] += 0.5
        probs[v, pos[inst.lmax(v)]] += 0.5
    return probs


def _satisfy_prob(pu: np.ndarray, pv: np.ndarray, universe: np.ndarray, offset: int) -> float:
    mask = universe[:, None] + offset <= universe[None, :]
    return float(pu @ mask @ pv)


def edge_probabilities(inst: RmasInstance, probs: np.ndarray, universe: Sequence[int]) -> np.ndarray:
    """Exact per-edge satisfaction probability under independent vertex labels."""
    lab = np.asarray(universe)
    return np.array([_satisfy_prob(probs[e.tail], probs[e.head], lab, inst.offsets[i])
                     for i, e in enumerate(inst.g.edges)])


def expected_value(inst: RmasInstance, probs: np.ndarray, universe: Sequence[int]) -> float:
    return float(edge_probabilities(inst, probs, universe) @ inst.g.weights) if inst.g.m else 0.0


def expected_rmas_value(inst: RmasInstance, sol: FractionalRmasSolution) -> float:
    return expected_value(inst, extreme_boost_distribution(sol), sol.universe)


def per_edge_rmas_guarantee(inst: RmasInstance, sol: FractionalRmasSolution) -> list[EdgeGuarantee]:
    probs = edge_probabilities(inst, extreme_boost_distribution(sol), sol.universe)
    z = sol.z
    return [EdgeGuarantee(e, float(probs[e]), float(z[e]), OFFSET_ROUNDING_FACTOR * float(z[e]))
            for e in range(inst.g.m)]


def _sample(probs: np.ndarray, universe: Sequence[int], rng: np.random.Generator) -> list[int]:
    cum = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0])
    out = []
    for v in range(probs.shape[0]):
        a = int(np.searchsorted(cum[v], u[v], side="right"))
        # guard against cumulative sums falling short of 1 by rounding
        a = min(a, int(np.flatnonzero(probs[v] > 0)[-1]))
        out.append(int(universe[a]))
    return out


def round_offset_labels(sol: FractionalRmasSolution, seed) -> list[int]:
    rng = np.random.default_rng(seed)
    return _sample(extreme_boost_distribution(sol), sol.universe, rng)


def minmax_baseline(inst: RmasInstance, seed) -> list[int]:
    rng = np.random.default_rng(seed)
    coins = rng.random(inst.g.n) < 0.5
    return [inst.lmin(v) if c else inst.lmax(v) for v, c in enumerate(coins)]


def minmax_expected_value(inst: RmasInstance) -> float:
    universe = inst.universe
    return expected_value(inst, minmax_distribution(inst, universe), universe)
