"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line; the lines are repeated in
the terminal summary.
"""
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from korder import bruteforce, ded, maxk, rmas, suites
from korder.graph import forward_weight
from korder.instances import complete_digraph, path_graph, random_digraph, rng_for


def report(number: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def maxk_results():
    start = time.perf_counter()
    rows = []
    for i, g, k in suites.maxk_suite(200, seed=0):
        sol = maxk.solve_maxk_lp(g, k)
        rows.append((i, g, k, sol, maxk.per_edge_guarantee(g, sol)))
    return rows, time.perf_counter() - start


@pytest.fixture(scope="module")
def rmas_results():
    rows = []
    for i, inst in suites.rmas_suite(200, seed=0):
        pre, _ = rmas.preprocess(inst)
        rows.append((i, pre, rmas.solve_rmas_lp(pre)))
    return rows


@pytest.fixture(scope="module")
def ded_results():
    rows = []
    for i, g, k in suites.ded_suite(100, seed=0):
        rows.append((i, g, k, bruteforce.brute_ded(g, k)[0]))
    return rows


def test_criterion_1_complete_digraph_gap():
    start = time.perf_counter()
    bad = []
    for n in range(3, 9):
        g = complete_digraph(n)
        total = n * (n - 1)
        for k in range(2, n + 1):
            lp_frac = maxk.solve_maxk_lp(g, k).objective / total
            opt, witness = bruteforce.brute_maxk(g, k)
            opt_frac = Fraction(int(round(opt)), total)
            if abs(lp_frac - (1 - 1 / k)) > 1e-6:
                bad.append(f"LP n={n} k={k}: {lp_frac}")
            if opt != int(opt) or opt_frac != bruteforce.balanced_optimum_fraction(n, k) or \
                    forward_weight(g, witness) != opt:
                bad.append(f"OPT n={n} k={k}: {opt}")
            if k == n and abs(lp_frac / float(opt_frac) - (2 - 2 / n)) > 1e-6:
                bad.append(f"gap n={n}: {lp_frac / float(opt_frac)}")
    elapsed = time.perf_counter() - start
    report(1, not bad and elapsed < 120, f"n=3..8, k=2..n; {len(bad)} mismatches {bad[:3]}; {elapsed:.1f}s (< 120s)")


def test_criterion_2_per_edge_rounding_bound(maxk_results):
    rows, elapsed = maxk_results
    edges = [eg for *_, gs in rows for eg in gs]
    violations = [eg for eg in edges if not eg.probability >= eg.z / 2 - 1e-9]
    worst = min(eg.probability - eg.z / 2 for eg in edges)
    ok = len(rows) == 200 and not violations and elapsed < 300
    report(2, ok, f"{len(rows)} instances, {len(edges)} edges, {len(violations)} violations, "
                  f"min Pr - z/2 = {worst:.3g}; {elapsed:.1f}s (< 300s)")


def test_criterion_3_derandomized_value(maxk_results):
    rows, _ = maxk_results
    low, high, compared = [], [], 0
    for i, g, k, sol, _ in rows:
        value = forward_weight(g, maxk.derandomize(g, sol))
        if value < sol.objective / 2 - 1e-9:
            low.append(i)
        if g.n <= 7 and k <= 4:
            compared += 1
            if value > bruteforce.brute_maxk(g, k)[0] + 1e-9:
                high.append(i)
    report(3, not low and not high,
           f"below LP/2 on {len(low)} of {len(rows)}; above optimum on {len(high)} of {compared} brute-checked")


def test_criterion_4_mass_inequality():
    rng = rng_for(0)
    worst, cells = math.inf, 0
    for k in range(2, 7):
        for theta in range(1, k):
            for _ in range(1000):
                worst = min(worst, maxk.check_mass_inequality(suites.random_nonneg_matrix(rng, k), theta).slack)
                cells += 1
    gaps = [abs(r.lhs - r.rhs) for t in (0.3, 1.0, 2.5, 17.0)
            for r in [maxk.check_mass_inequality(np.array([[0.0, t], [0.0, 0.0]]), 1)]]
    ok = worst >= -1e-9 and max(gaps) <= 1e-12
    report(4, ok, f"{cells} matrices, min slack {worst:.3g}; single-cell max |lhs-rhs| {max(gaps):.1g}")


def test_criterion_5_offset_rounding_bound(rmas_results):
    edges = [eg for _, pre, sol in rmas_results for eg in rmas.per_edge_rmas_guarantee(pre, sol)]
    violations = [eg for eg in edges if not eg.probability >= rmas.OFFSET_ROUNDING_FACTOR * eg.z - 1e-9]
    sizes_ok = all(pre.g.n <= 15 and max(map(len, pre.label_sets)) <= 5 and max(pre.offsets, default=1) <= 3
                   for _, pre, _ in rmas_results)
    report(5, sizes_ok and not violations and len(rmas_results) == 200,
           f"{len(rmas_results)} instances, {len(edges)} edges, {len(violations)} violations")


def test_criterion_6_minmax_baseline(rmas_results):
    short = [i for i, pre, _ in rmas_results
             if rmas.minmax_expected_value(pre) < rmas.satisfiable_weight(pre) / 4 - 1e-9]
    report(6, not short, f"expectation below satisfiable/4 on {len(short)} of {len(rmas_results)} instances")


def test_criterion_7_local_ratio(ded_results):
    over = [i for i, g, k, opt in ded_results if ded.local_ratio(g, k).cost > k * opt + 1e-9]
    tight = []
    for k in (2, 3, 4):
        g = path_graph(k)
        tight.append((ded.local_ratio(g, k).cost, bruteforce.brute_ded(g, k)[0]) == (k, 1))
    sizes_ok = all(g.m <= 18 for _, g, _, _ in ded_results)
    report(7, sizes_ok and not over and all(tight) and len(ded_results) == 100,
           f"ratio > k on {len(over)} of {len(ded_results)}; unit k-path cost k vs optimum 1: {all(tight)}")


def test_criterion_8_lp_threshold(ded_results):
    above, ratio, infeasible, separated = [], [], [], []
    for i, g, k, opt in ded_results:
        lp = ded.solve_ded_lp(g, k)
        if lp.objective > opt + 1e-6:
            above.append(i)
        if ded.separation_oracle(g, k, lp.x).violated:
            separated.append(i)
        sol = ded.threshold_round(g, k, lp.x)
        if sol.cost > k * lp.objective + 1e-6:
            ratio.append(i)
        if not sol.is_feasible(g, k):
            infeasible.append(i)
    ok = not (above or ratio or infeasible or separated)
    report(8, ok, f"LP > OPT: {len(above)}, cost > k*LP: {len(ratio)}, infeasible: {len(infeasible)}, "
                  f"violated after separation: {len(separated)} (of {len(ded_results)})")


def test_criterion_9_embedding():
    rng = rng_for(9)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 9))
        g = random_digraph(n, int(rng.integers(1, min(16, n * (n - 1)) + 1)), int(rng.integers(2**32)),
                           max_weight=5)
        k = int(rng.integers(2, 5))
        a = rmas.solve_rmas_lp(rmas.RmasInstance.from_maxk(g, k)).objective
        b = maxk.solve_maxk_lp(g, k).objective
        worst = max(worst, abs(a - b))
    report(9, worst <= 1e-6, f"50 instances, max |RMAS LP - Max-k LP| = {worst:.3g}")


def test_criterion_10_determinism(tmp_path):
    def korder(*args):
        return subprocess.run([sys.executable, "-m", "korder", *map(str, args)], capture_output=True,
                              check=True, cwd=tmp_path).stdout

    gens = {
        "complete.txt": ["complete", "--n", 5, "--k", 3],
        "sampled.txt": ["sampled", "--n", 12, "--m", 40, "--k", 3, "--seed", 7],
        "digraph.txt": ["digraph", "--n", 9, "--m", 20, "--k", 3, "--max-weight", 4, "--seed", 5],
        "dag.txt": ["dag", "--n", 9, "--p", 0.4, "--k", 3, "--max-weight", 3, "--seed", 2],
        "rmas.txt": ["rmas", "--n", 10, "--m", 20, "--max-label", 5, "--max-offset", 2, "--seed", 1],
    }
    commands = [["gen", *args] for args in gens.values()]
    for name, args in gens.items():
        korder("gen", *args, "--out", name)
    for f in ("complete.txt", "sampled.txt", "digraph.txt"):
        for method in ("lp-round", "derand", "random", "brute"):
            commands.append(["solve", "maxk", f, "--method", method, "--trials", 7, "--seed", 11])
    for method in ("lp-round", "random", "brute"):
        commands.append(["solve", "rmas", "rmas.txt", "--method", method, "--trials", 7, "--seed", 11])
    for method in ("local-ratio", "lp-threshold", "brute"):
        commands.append(["solve", "ded", "dag.txt", "--method", method, "--seed", 11])
    commands.append(["gap", "--n", "3-6", "--k", "2-6"])
    commands.append(["verify", "all", "--count", 10, "--ded-count", 10, "--per-pair", 50, "--seed", 3])
    differing = [" ".join(map(str, c)) for c in commands if korder(*c) != korder(*c)]
    report(10, not differing, f"{len(commands)} seeded commands run twice; {len(differing)} differ {differing[:2]}")
