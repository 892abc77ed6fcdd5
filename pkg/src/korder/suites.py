"""Seeded property suites: randomized instance families and the checks run on them.

Each ``run_*`` function returns a plain dict report with a check count, a
failure count, named counters and up to ``MAX_DETAILS`` failure records.
"""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from . import bruteforce, ded, maxk, rmas
from .graph import WeightedDigraph, forward_weight, longest_path_length
from .instances import complete_digraph, random_dag_edges, random_digraph, random_rmas, rng_for

MAX_DETAILS = 20
MAXK_KS = (2, 3, 5, 8)
DED_KS = (2, 3, 4)


def maxk_suite(count: int = 200, seed: int = 0) -> Iterator[tuple[int, WeightedDigraph, int]]:
    """Random digraphs with ``n <= 20``, ``m <= 60``, k cycling through 2, 3, 5, 8."""
    rng = rng_for(seed)
    for i in range(count):
        k = MAXK_KS[i % len(MAXK_KS)]
        n = int(rng.integers(2, 21))
        m = int(rng.integers(1, min(60, n * (n - 1)) + 1))
        g = random_digraph(n, m, int(rng.integers(2**63 - 1)), max_weight=5)
        yield i, g, k


def rmas_suite(count: int = 200, seed: int = 0) -> Iterator[tuple[int, rmas.RmasInstance]]:
    """OffsetRMAS instances with ``n <= 15``, ``|S_v| <= 5``, offsets ``<= 3``."""
    rng = rng_for(seed)
    for i in range(count):
        n = int(rng.integers(2, 16))
        m = int(rng.integers(1, min(40, n * (n - 1)) + 1))
        inst = random_rmas(n, m, max_label=6, max_offset=3, seed=int(rng.integers(2**63 - 1)),
                           max_set_size=5, max_weight=5)
        yield i, inst


def ded_suite(count: int = 100, seed: int = 0) -> Iterator[tuple[int, WeightedDigraph, int]]:
    """Random DAGs with at most 18 edges; every other instance is unit-weight."""
    rng = rng_for(seed)
    for i in range(count):
        k = DED_KS[i % len(DED_KS)]
        n = int(rng.integers(k + 1, 11))
        m = int(rng.integers(1, min(18, n * (n - 1) // 2) + 1))
        g = random_dag_edges(n, m, int(rng.integers(2**63 - 1)), max_weight=None if i % 2 else 5)
        yield i, g, k


def random_nonneg_matrix(rng: np.random.Generator, k: int) -> np.ndarray:
    """Mixture of dense, sparse and near-diagonal non-negative matrices."""
    kind = rng.integers(3)
    a = rng.exponential(size=(k, k))
    if kind == 1:
        a *= rng.random((k, k)) < 0.3
    elif kind == 2:
        i, j = np.indices((k, k))
        a *= np.exp(-abs(j - i - rng.integers(0, k)))
    return a


class _Report:
    def __init__(self, suite: str):
        self.suite = suite
        self.checks = 0
        self.failures = 0
        self.counters: dict[str, float] = {}
        self.details: list[dict] = []

    def check(self, name: str, ok: bool, **info):
        self.checks += 1
        self.counters[name] = self.counters.get(name, 0) + 1
        if not ok:
            self.failures += 1
            key = name + "_failures"
            self.counters[key] = self.counters.get(key, 0) + 1
            if len(self.details) < MAX_DETAILS:
                self.details.append({"check": name, **info})

    def track_min(self, name: str, value: float):
        if name not in self.counters or value < self.counters[name]:
            self.counters[name] = value

    def track_max(self, name: str, value: float):
        if name not in self.counters or value > self.counters[name]:
            self.counters[name] = value

    def as_dict(self) -> dict:
        return {"suite": self.suite, "checks": self.checks, "failures": self.failures,
                "passed": self.failures == 0, "counters": dict(sorted(self.counters.items())),
                "failed": self.details}


def run_mass_inequality(per_pair: int = 1000, seed: int = 0) -> dict:
    rep = _Report("inequality")
    rng = rng_for(seed)
    for k in range(2, 7):
        for theta in range(1, k):
            for _ in range(per_pair):
                res = maxk.check_mass_inequality(random_nonneg_matrix(rng, k), theta)
                rep.track_min("min_slack", res.slack)
                rep.check("inequality", res.lhs >= res.rhs - 1e-9, k=k, theta=theta, slack=res.slack)
    t = float(rng.exponential()) + 0.5
    res = maxk.check_mass_inequality(np.array([[0.0, t], [0.0, 0.0]]), 1)
    rep.check("single_cell_equality", abs(res.lhs - res.rhs) <= 1e-12, lhs=res.lhs, rhs=res.rhs)
    return rep.as_dict()


def run_rounding(count: int = 200, seed: int = 0) -> dict:
    rep = _Report("rounding")
    for i, g, k in maxk_suite(count, seed):
        sol = maxk.solve_maxk_lp(g, k)
        for eg in maxk.per_edge_guarantee(g, sol):
            rep.check("ordering_edge_bound", eg.holds, instance=i, edge=eg.edge, probability=eg.probability, z=eg.z)
        value = forward_weight(g, maxk.derandomize(g, sol))
        rep.check("derandomized_half_lp", value >= sol.objective / 2 - 1e-9, instance=i, value=value,
                  lp=sol.objective)
        if g.n <= 7 and k <= 4:
            opt, _ = bruteforce.brute_maxk(g, k)
            rep.check("lp_dominates_opt", sol.objective >= opt - 1e-6, instance=i, lp=sol.objective, opt=opt)
            rep.check("derandomized_below_opt", value <= opt + 1e-9, instance=i, value=value, opt=opt)
    for i, inst in rmas_suite(count, seed):
        pre, _ = rmas.preprocess(inst)
        sol = rmas.solve_rmas_lp(pre)
        for eg in rmas.per_edge_rmas_guarantee(pre, sol):
            rep.check("offset_edge_bound", eg.holds, instance=i, edge=eg.edge, probability=eg.probability, z=eg.z)
        base = rmas.minmax_expected_value(pre)
        sat = rmas.satisfiable_weight(pre)
        rep.check("minmax_quarter", base >= sat / 4 - 1e-9, instance=i, expected=base, satisfiable=sat)
    return rep.as_dict()


def run_ded(count: int = 100, seed: int = 0) -> dict:
    rep = _Report("ded")
    for i, g, k in ded_suite(count, seed):
        opt, witness = bruteforce.brute_ded(g, k)
        rep.check("brute_feasible", longest_path_length(g.subgraph_without(witness)) <= k - 1, instance=i)
        lr = ded.local_ratio(g, k)
        rep.check("local_ratio_feasible", lr.is_feasible(g, k), instance=i)
        rep.check("local_ratio_ratio", lr.cost <= k * opt + 1e-9, instance=i, cost=lr.cost, opt=opt, k=k)
        lp = ded.solve_ded_lp(g, k)
        rep.check("lp_below_opt", lp.objective <= opt + 1e-6, instance=i, lp=lp.objective, opt=opt)
        final = ded.separation_oracle(g, k, lp.x)
        rep.check("lp_separated", not final.violated, instance=i, value=final.value)
        rounded = ded.threshold_round(g, k, lp.x)
        rep.check("threshold_feasible", rounded.is_feasible(g, k), instance=i)
        rep.check("threshold_ratio", rounded.cost <= k * lp.objective + 1e-6, instance=i, cost=rounded.cost,
                  lp=lp.objective, k=k)
        if opt > 0:
            rep.track_max("worst_local_ratio", lr.cost / opt)
    return rep.as_dict()


SUITES = {"inequality": run_mass_inequality, "rounding": run_rounding, "ded": run_ded}


def gap_rows(ns, ks, brute_limit: int = 8) -> list[dict]:
    """Integrality-gap table rows for complete digraphs."""
    rows = []
    for n in ns:
        g = complete_digraph(n)
        total = g.total_weight()
        for k in ks:
            if not 2 <= k <= n:
                continue
            lp_frac = maxk.solve_maxk_lp(g, k).objective / total
            if n <= brute_limit:
                opt, _ = bruteforce.brute_maxk(g, k)
                opt_frac, source = opt / total, "brute"
            else:
                opt_frac, source = float(bruteforce.balanced_optimum_fraction(n, k)), "formula"
            rows.append({"n": n, "k": k, "lp_fraction": lp_frac, "opt_fraction": opt_frac,
                         "gap": lp_frac / opt_frac if opt_frac > 0 else math.inf,
                         "gap_limit": 2 - 2 / n, "opt_source": source})
    return rows
