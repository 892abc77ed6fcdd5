"""Max-k-Ordering: LP relaxation, randomized rounding and derandomization.

Variable layout in the relaxation (labels are 1-based externally, 0-based
in arrays):

* ``x[v, i]`` at index ``v*k + i``
* ``y[e, i, j]`` at index ``n*k + e*k*k + i*k + j``
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp as lpmod
from .graph import WeightedDigraph, forward_weight, topological_order

MARGINAL_TOL = 1e-6


@dataclass(frozen=True)
class MaxkIndex:
    n: int
    m: int
    k: int

    def x(self, v: int, i: int) -> int:
        return v * self.k + i

    def y(self, e: int, i: int, j: int) -> int:
        return self.n * self.k + e * self.k * self.k + i * self.k + j

    @property
    def num_vars(self) -> int:
        return self.n * self.k + self.m * self.k * self.k


@dataclass(frozen=True)
class FractionalOrderingSolution:
    k: int
    x: np.ndarray  # (n, k)
    y: np.ndarray  # (m, k, k)
    objective: float

    @property
    def z(self) -> np.ndarray:
        """Per-edge LP contribution: mass of ``y`` strictly above the diagonal."""
        return np.triu(self.y, 1).sum(axis=(1, 2))

    def check(self, tol: float = MARGINAL_TOL) -> None:
        """Raise ``AssertionError`` unless the marginalization constraints hold."""
        assert np.all(np.abs(self.x.sum(axis=1) - 1) <= tol), "vertex marginals do not sum to 1"
        assert self.x.min(initial=0) >= -1e-9 and self.y.min(initial=0) >= -1e-9, "negative LP entry"

    def check_edges(self, g: WeightedDigraph, tol: float = MARGINAL_TOL) -> None:
        self.check(tol)
        for idx, e in enumerate(g.edges):
            assert np.all(np.abs(self.y[idx].sum(axis=1) - self.x[e.tail]) <= tol), f"row sums of edge {idx}"
            assert np.all(np.abs(self.y[idx].sum(axis=0) - self.x[e.head]) <= tol), f"column sums of edge {idx}"


@dataclass(frozen=True)
class RoundingDistribution:
    probs: np.ndarray  # (n, k), row v is the label distribution of vertex v

    @classmethod
    def from_solution(cls, sol: FractionalOrderingSolution) -> "RoundingDistribution":
        k = sol.k
        x = clean_marginals(sol.x)
        return cls(1.0 / (2 * k) + x / 2.0)

    def sample(self, rng: np.random.Generator) -> list[int]:
        cum = np.cumsum(self.probs, axis=1)
        u = rng.random(self.probs.shape[0])
        labels = (u[:, None] >= cum).sum(axis=1)
        return [int(min(lab, self.probs.shape[1] - 1)) + 1 for lab in labels]


@dataclass(frozen=True)
class EdgeGuarantee:
    edge: int
    probability: float
    z: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.probability >= self.bound - 1e-9


def clean_marginals(x: np.ndarray) -> np.ndarray:
    """Clip solver noise below zero and renormalize each row to sum to one."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    sums = x.sum(axis=1, keepdims=True)
    return x / np.where(sums > 0, sums, 1.0)


def build_maxk_lp(g: WeightedDigraph, k: int) -> tuple[lpmod.LinearProgram, MaxkIndex]:
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    idx = MaxkIndex(g.n, g.m, k)
    nv = idx.num_vars
    obj = np.zeros(nv)
    upper = np.triu(np.ones((k, k)), 1).ravel()
    for e, edge in enumerate(g.edges):
        base = idx.y(e, 0, 0)
        obj[base:base + k * k] = edge.weight * upper
    cons = []
    for v in range(g.n):
        vec = np.zeros(nv)
        vec[idx.x(v, 0):idx.x(v, 0) + k] = 1.0
        cons.append(lpmod.Constraint(vec, "=", 1.0))
    for e, edge in enumerate(g.edges):
        base = idx.y(e, 0, 0)
        for i in range(k):
            vec = np.zeros(nv)
            vec[base + i * k:base + (i + 1) * k] = 1.0
            vec[idx.x(edge.tail, i)] = -1.0
            cons.append(lpmod.Constraint(vec, "=", 0.0))
        for j in range(k):
            vec = np.zeros(nv)
            vec[base + j:base + k * k:k] = 1.0
            vec[idx.x(edge.head, j)] = -1.0
            cons.append(lpmod.Constraint(vec, "=", 0.0))
    return lpmod.LinearProgram("max", obj, tuple(cons)), idx


def solve_maxk_lp(g: WeightedDigraph, k: int) -> FractionalOrderingSolution:
    prog, idx = build_maxk_lp(g, k)
    res = lpmod.solve(prog)
    if not res.optimal:
        raise lpmod.LpError(f"Max-k-Ordering relaxation reported {res.status}")
    x = res.x[:g.n * k].reshape(g.n, k)
    y = res.x[g.n * k:].reshape(g.m, k, k)
    return FractionalOrderingSolution(k, x, y, res.objective)


def _forward_prob(pu: np.ndarray, pv: np.ndarray) -> float:
    """Pr[label(u) < label(v)] for independent label distributions."""
    # suffix sums of pv strictly above each label
    above = np.concatenate([np.cumsum(pv[::-1])[::-1][1:], [0.0]])
    return float(pu @ above)


def round_ordering(sol: FractionalOrderingSolution, seed) -> list[int]:
    """Sample each vertex label independently with probability ``1/(2k) + x/2``."""
    rng = np.random.default_rng(seed)
    return RoundingDistribution.from_solution(sol).sample(rng)


def per_edge_guarantee(g: WeightedDigraph, sol: FractionalOrderingSolution) -> list[EdgeGuarantee]:
    p = RoundingDistribution.from_solution(sol).probs
    z = sol.z
    return [EdgeGuarantee(i, _forward_prob(p[e.tail], p[e.head]), float(z[i]), float(z[i]) / 2)
            for i, e in enumerate(g.edges)]


def expected_rounded_value(g: WeightedDigraph, sol: FractionalOrderingSolution) -> float:
    p = RoundingDistribution.from_solution(sol).probs
    return float(sum(e.weight * _forward_prob(p[e.tail], p[e.head]) for e in g.edges))


def expected_value_under(g: WeightedDigraph, probs: np.ndarray) -> float:
    """Exact expected forward weight when vertex ``v`` draws labels from ``probs[v]``."""
    return float(sum(e.weight * _forward_prob(probs[e.tail], probs[e.head]) for e in g.edges))


def derandomize(g: WeightedDigraph, sol: FractionalOrderingSolution) -> list[int]:
    """Method of conditional expectations over the rounding distribution.

    Vertices are fixed in topological order when ``g`` is acyclic, in index
    order otherwise; each takes the label maximizing the conditional
    expectation, lowest label on ties.
    """
    k = sol.k
    probs = RoundingDistribution.from_solution(sol).probs.copy()
    order = topological_order(g) or list(range(g.n))
    outgoing, incoming = g.out_edges(), g.in_edges()
    labels = [0] * g.n
    for v in order:
        gain = np.zeros(k)
        for idx in outgoing[v]:
            e = g.edges[idx]
            ph = probs[e.head]
            # Pr[label(head) > a] for each candidate a
            gain += e.weight * np.concatenate([np.cumsum(ph[::-1])[::-1][1:], [0.0]])
        for idx in incoming[v]:
            e = g.edges[idx]
            pt = probs[e.tail]
            # Pr[label(tail) < a]
            gain += e.weight * np.concatenate([[0.0], np.cumsum(pt)[:-1]])
        best = int(np.flatnonzero(gain >= gain.max() - 1e-12)[0])
        labels[v] = best + 1
        probs[v] = 0.0
        probs[v, best] = 1.0
    return labels


def random_k_ordering(g: WeightedDigraph, k: int, seed) -> list[int]:
    """Uniform independent labels in ``1..k``."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    rng = np.random.default_rng(seed)
    return [int(a) for a in rng.integers(1, k + 1, size=g.n)]


def random_ordering_edge_probability(k: int) -> float:
    """Per-edge forward probability of a uniform random k-ordering."""
    return (k - 1) / (2 * k)


@dataclass(frozen=True)
class MassInequalityCheck:
    lhs: float
    rhs: float
    holds: bool

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def check_mass_inequality(a: np.ndarray, theta: int) -> MassInequalityCheck:
    """Compare row/column-sum products against the squared offset mass.

    With ``r``, ``c`` the row and column sums of the non-negative ``k x k``
    matrix ``a``, checks ``sum_{i+theta<=j} r_i c_j >=
    (k-theta+1)/(2(k-theta)) * (sum_{i+theta<=j} a_ij)**2``.
    """
    a = np.asarray(a, dtype=float)
    k = a.shape[0]
    if a.shape != (k, k):
        raise ValueError("matrix must be square")
    if not 1 <= theta <= k - 1:
        raise ValueError(f"offset must lie in 1..{k - 1}, got {theta}")
    if (a < 0).any():
        raise ValueError("matrix entries must be non-negative")
    i, j = np.indices((k, k))
    mask = (i + theta <= j).astype(float)
    r, c = a.sum(axis=1), a.sum(axis=0)
    lhs = float(r @ mask @ c)
    mass = float((a * mask).sum())
    rhs = (k - theta + 1) / (2 * (k - theta)) * mass ** 2
    return MassInequalityCheck(lhs, rhs, lhs >= rhs - 1e-9)


def labeling_value(g: WeightedDigraph, labels) -> float:
    return forward_weight(g, labels)
