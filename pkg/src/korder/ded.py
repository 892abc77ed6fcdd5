"""DAG edge deletion: remove minimum weight so no path with k edges remains.

Two k-approximations: the local-ratio loop, and the path-covering LP
(solved by row generation against a dynamic-programming separation
oracle) followed by threshold rounding at ``1/k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import lp as lpmod
from .graph import CyclicGraphError, WeightedDigraph, find_cycle, longest_path_length, topological_order

SEPARATION_TOL = 1e-7
THRESHOLD_TOL = 1e-9


class RowGenerationLimitError(RuntimeError):
    def __init__(self, rounds: int):
        self.rounds = rounds
        super().__init__(f"row generation did not converge within {rounds} rounds")


class InfeasibleRoundingError(RuntimeError):
    """Threshold rounding left a path with k edges; carries that path's edge ids."""

    def __init__(self, path: Sequence[int]):
        self.path = list(path)
        super().__init__(f"residual graph still contains the path {self.path}")


@dataclass(frozen=True)
class DedSolution:
    deleted: frozenset[int]
    cost: float
    method: str

    def residual(self, g: WeightedDigraph) -> WeightedDigraph:
        return g.subgraph_without(self.deleted)

    def is_feasible(self, g: WeightedDigraph, k: int) -> bool:
        return longest_path_length(self.residual(g)) <= k - 1


@dataclass(frozen=True)
class SeparationResult:
    path: list[int] | None  # edge ids of a violated path, in order
    value: float  # min over v of a[v][k]
    table: np.ndarray  # a[v, t], +inf where no path with t edges ends at v
    paths: list[list[int]] = field(default_factory=list)

    @property
    def violated(self) -> bool:
        return self.path is not None


@dataclass(frozen=True)
class DedLpResult:
    x: np.ndarray
    objective: float
    paths: list[list[int]]
    rounds: int


def _order_or_raise(g: WeightedDigraph) -> list[int]:
    order = topological_order(g)
    if order is None:
        raise CyclicGraphError(find_cycle(g) or [])
    return order


def path_vertices(g: WeightedDigraph, path: Sequence[int]) -> list[int]:
    if not path:
        return []
    return [g.edges[path[0]].tail] + [g.edges[e].head for e in path]


def find_k_path(g: WeightedDigraph, k: int, residual_weights: Sequence[float] | None = None) -> list[int] | None:
    """Edge ids of a path with exactly ``k`` edges of positive residual weight.

    Longest-path DP in topological order with parent pointers; the path
    ends at the first vertex (in that order) reached by ``k`` edges.
    """
    order = _order_or_raise(g)
    if residual_weights is None:
        residual_weights = g.weights
    incoming = g.in_edges()
    depth = [0] * g.n
    parent = [-1] * g.n
    for v in order:
        for idx in incoming[v]:
            if residual_weights[idx] <= 0:
                continue
            u = g.edges[idx].tail
            if depth[u] + 1 > depth[v]:
                depth[v] = depth[u] + 1
                parent[v] = idx
        if depth[v] >= k:
            path = []
            cur = v
            while len(path) < k:
                idx = parent[cur]
                path.append(idx)
                cur = g.edges[idx].tail
            return path[::-1]
    return None


def local_ratio(g: WeightedDigraph, k: int, reverse_delete: bool = False) -> DedSolution:
    """Local-ratio k-approximation.

    Repeatedly finds a path with k edges among positive-residual edges and
    subtracts its smallest residual weight from every edge on it. Edges
    reaching zero (including those of zero weight to begin with) are
    deleted.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    _order_or_raise(g)
    residual = g.weights.copy()
    zeroed_at = {e: 0 for e in range(g.m) if residual[e] == 0}
    step = 0
    while True:
        path = find_k_path(g, k, residual)
        if path is None:
            break
        step += 1
        w_min = min(residual[e] for e in path)
        for e in path:
            residual[e] -= w_min
            if residual[e] <= 0:
                residual[e] = 0.0
                zeroed_at.setdefault(e, step)
        if step > g.m:
            raise RuntimeError("local ratio exceeded m iterations")
    deleted = set(zeroed_at)
    if reverse_delete:
        for e in sorted(zeroed_at, key=lambda e: (-zeroed_at[e], e)):
            trial = deleted - {e}
            if longest_path_length(g.subgraph_without(trial)) <= k - 1:
                deleted = trial
    return DedSolution(frozenset(deleted), float(sum(g.edges[e].weight for e in deleted)), "local_ratio")


def separation_oracle(g: WeightedDigraph, k: int, x: Sequence[float], all_paths: bool = False) -> SeparationResult:
    """Find a path with k edges whose x-sum is below one.

    ``a[v, t]`` is the least x-sum over paths with exactly ``t`` edges ending
    at ``v`` (``+inf`` when none exists). With ``all_paths`` one minimizing
    path per violating end vertex is collected in ``paths``.
    """
    order = _order_or_raise(g)
    x = np.asarray(x, dtype=float)
    if (x < 0).any():
        raise ValueError("x must be non-negative")
    incoming = g.in_edges()
    a = np.full((g.n, k + 1), math.inf)
    a[:, 0] = 0.0
    parent = np.full((g.n, k + 1), -1, dtype=np.int64)
    for v in order:
        for idx in incoming[v]:
            u = g.edges[idx].tail
            cand = a[u, :k] + x[idx]
            better = cand < a[v, 1:]
            a[v, 1:][better] = cand[better]
            parent[v, 1:][better] = idx

    def trace(v: int) -> list[int]:
        path = []
        for t in range(k, 0, -1):
            idx = int(parent[v, t])
            path.append(idx)
            v = g.edges[idx].tail
        return path[::-1]

    if g.n == 0:
        return SeparationResult(None, math.inf, a)
    ends = a[:, k]
    best = int(np.argmin(ends))
    value = float(ends[best])
    if value >= 1 - SEPARATION_TOL:
        return SeparationResult(None, value, a)
    paths = [trace(v) for v in order if ends[v] < 1 - SEPARATION_TOL] if all_paths else []
    return SeparationResult(trace(best), value, a, paths)


def path_constraint(num_vars: int, path: Sequence[int]) -> lpmod.Constraint:
    vec = np.zeros(num_vars)
    for e in path:
        vec[e] += 1.0
    return lpmod.Constraint(vec, ">=", 1.0)


def solve_ded_lp(g: WeightedDigraph, k: int, all_paths: bool = False, max_rounds: int | None = None) -> DedLpResult:
    """Path-covering relaxation solved by row generation.

    Starts from no path constraints and adds the oracle's violated path each
    round until the oracle certifies the point. The round cap defaults to
    ``m * n``.
    """
    _order_or_raise(g)
    if max_rounds is None:
        max_rounds = max(1, g.m * g.n)
    prog = lpmod.LinearProgram("min", g.weights, ())
    paths: list[list[int]] = []
    seen: set[tuple[int, ...]] = set()
    rounds = 0
    while True:
        res = lpmod.solve(prog)
        if not res.optimal:
            raise lpmod.LpError(f"path-covering relaxation reported {res.status}")
        x = np.clip(res.x, 0.0, None)
        sep = separation_oracle(g, k, x, all_paths=all_paths)
        if not sep.violated:
            return DedLpResult(x, float(g.weights @ x), paths, rounds)
        rounds += 1
        if rounds > max_rounds:
            raise RowGenerationLimitError(max_rounds)
        new = [p for p in (sep.paths if all_paths else [sep.path]) if tuple(p) not in seen]
        for p in new:
            seen.add(tuple(p))
            paths.append(p)
        prog = lpmod.add_constraints(prog, [path_constraint(g.m, p) for p in new])


def threshold_round(g: WeightedDigraph, k: int, x: Sequence[float]) -> DedSolution:
    """Delete every edge with ``x_e >= 1/k``."""
    x = np.asarray(x, dtype=float)
    deleted = frozenset(int(e) for e in np.flatnonzero(x >= 1.0 / k - THRESHOLD_TOL))
    keep = [e not in deleted for e in range(g.m)]
    leftover = find_k_path(g, k, np.where(keep, 1.0, 0.0))
    if leftover is not None:
        raise InfeasibleRoundingError(leftover)
    return DedSolution(deleted, float(sum(g.edges[e].weight for e in deleted)), "lp_threshold")
