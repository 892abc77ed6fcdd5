"""Exact exponential-time solvers used as ground truth.

Every enumerator has a hard cap and raises :class:`CapExceededError` rather
than truncating.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .graph import CyclicGraphError, WeightedDigraph, find_cycle, is_acyclic
from .rmas import RmasInstance

MAXK_CAP = 10**7
RMAS_CAP = 10**7
DED_CAP = 10**6
CHUNK = 1 << 16


class CapExceededError(RuntimeError):
    pass


def _mixed_radix(start: int, stop: int, radices: list[int]) -> np.ndarray:
    """Rows are the digit vectors of ``start..stop-1``, least significant first."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, len(radices)), dtype=np.int64)
    for pos, r in enumerate(radices):
        out[:, pos] = idx % r
        idx //= r
    return out


def _enumerate_best(g: WeightedDigraph, choices: list[np.ndarray], offsets: np.ndarray, total: int):
    tails, heads, w = g.tails, g.heads, g.weights
    radices = [len(c) for c in choices]
    table = np.full((g.n, max(radices, default=1)), -1, dtype=np.int64)
    for v, c in enumerate(choices):
        table[v, :len(c)] = c
    best_val, best_idx = -1.0, 0
    for start in range(0, total, CHUNK):
        digits = _mixed_radix(start, min(start + CHUNK, total), radices)
        labels = table[np.arange(g.n), digits]
        if g.m:
            sat = labels[:, tails] + offsets <= labels[:, heads]
            vals = sat @ w
        else:
            vals = np.zeros(labels.shape[0])
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_idx = float(vals[i]), start + i
    digits = _mixed_radix(best_idx, best_idx + 1, radices)[0]
    return best_val, [int(choices[v][digits[v]]) for v in range(g.n)]


def _ordered_partition_dp(g: WeightedDigraph, k: int):
    """Exact Max-k-Ordering by DP over vertex subsets.

    ``best[j][S]`` is the most forward weight inside ``S`` when ``S`` uses
    labels ``1..j``; the top label class ``T`` of ``S`` contributes the
    weight of edges from ``S - T`` into ``T``.
    """
    n = g.n
    full = (1 << n) - 1
    # into[v][A]: weight of edges from set A into v
    into = np.zeros((n, 1 << n))
    for e in g.edges:
        bit = 1 << e.tail
        masks = np.arange(1 << n)
        into[e.head, (masks & bit) != 0] += e.weight
    best = np.zeros(1 << n)
    choice = []
    for _ in range(2, k + 1):
        nxt = np.empty(1 << n)
        arg = np.zeros(1 << n, dtype=np.int64)
        for S in range(1 << n):
            val, pick = best[S], 0
            T = S
            while T:
                rest = S & ~T
                gain = best[rest]
                t = T
                while t:
                    v = (t & -t).bit_length() - 1
                    gain += into[v, rest]
                    t &= t - 1
                if gain > val:
                    val, pick = gain, T
                T = (T - 1) & S
            nxt[S], arg[S] = val, pick
        best = nxt
        choice.append(arg)
    labels = [1] * n
    S = full
    for j in range(k, 1, -1):
        T = int(choice[j - 2][S])
        t = T
        while t:
            v = (t & -t).bit_length() - 1
            labels[v] = j
            t &= t - 1
        S &= ~T
    return float(best[full]), labels


def brute_maxk(g: WeightedDigraph, k: int, cap: int = MAXK_CAP) -> tuple[float, list[int]]:
    """Exact Max-k-Ordering optimum and a witness labeling.

    Only ``min(k, n)`` labels matter (distinct values can always be
    compacted). Labelings are enumerated outright when there are at most
    ``cap`` of them; otherwise an exact subset DP over ordered partitions is
    used while ``3**n`` stays under the cap.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    kk = max(1, min(k, g.n))
    if g.n == 0:
        return 0.0, []
    if kk ** g.n <= cap:
        choices = [np.arange(1, kk + 1)] * g.n
        return _enumerate_best(g, choices, np.ones(g.m, dtype=np.int64), kk ** g.n)
    if 3 ** g.n <= cap:
        return _ordered_partition_dp(g, kk)
    raise CapExceededError(f"{kk}^{g.n} labelings exceed the cap of {cap}")


def brute_rmas(inst: RmasInstance, cap: int = RMAS_CAP) -> tuple[float, list[int]]:
    total = 1
    for s in inst.label_sets:
        total *= len(s)
    if total > cap:
        raise CapExceededError(f"{total} labelings exceed the cap of {cap}")
    if inst.g.n == 0:
        return 0.0, []
    choices = [np.asarray(s, dtype=np.int64) for s in inst.label_sets]
    return _enumerate_best(inst.g, choices, np.asarray(inst.offsets, dtype=np.int64), total)


def k_paths(g: WeightedDigraph, k: int) -> list[list[int]]:
    """All paths with exactly ``k`` edges, as edge id lists."""
    outgoing = g.out_edges()
    found = []

    def extend(path: list[int], v: int):
        if len(path) == k:
            found.append(list(path))
            return
        for idx in outgoing[v]:
            path.append(idx)
            extend(path, g.edges[idx].head)
            path.pop()

    for v in range(g.n):
        extend([], v)
    return found


def brute_ded(g: WeightedDigraph, k: int, cap: int = DED_CAP) -> tuple[float, frozenset[int]]:
    """Minimum-weight edge set meeting every path with ``k`` edges.

    Unit-weight instances are scanned by increasing cardinality with early
    exit; weighted ones by a full scan of all ``2**m`` subsets.
    """
    if not is_acyclic(g):
        raise CyclicGraphError(find_cycle(g) or [])
    if 2 ** g.m > cap:
        raise CapExceededError(f"2^{g.m} edge subsets exceed the cap of {cap}")
    paths = k_paths(g, k)
    if not paths:
        return 0.0, frozenset()
    masks = [sum(1 << e for e in p) for p in paths]
    w = g.weights
    if np.all(w == w[0]):
        for r in range(1, g.m + 1):
            for combo in itertools.combinations(range(g.m), r):
                s = sum(1 << e for e in combo)
                if all(s & pm for pm in masks):
                    return float(w[list(combo)].sum()), frozenset(combo)
    pmask = np.asarray(masks, dtype=np.int64)
    bits = np.arange(g.m, dtype=np.int64)
    best_val, best_set = np.inf, 0
    total = 1 << g.m
    for start in range(0, total, CHUNK):
        subsets = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        ok = np.ones(subsets.size, dtype=bool)
        for pm in pmask:
            ok &= (subsets & pm) != 0
        if not ok.any():
            continue
        cand = subsets[ok]
        vals = ((cand[:, None] >> bits) & 1) @ w
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_set = float(vals[i]), int(cand[i])
    return best_val, frozenset(e for e in range(g.m) if best_set >> e & 1)


def balanced_partition(n: int, k: int) -> list[int]:
    return [n // k + (1 if i < n % k else 0) for i in range(k)]


def balanced_optimum_fraction(n: int, k: int) -> Fraction:
    """Best forward fraction on the complete digraph with ``k`` labels.

    Forward edges number ``(n**2 - sum n_i**2) / 2`` for the balanced
    partition; dividing by ``n(n-1)`` edges gives the fraction.
    """
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got n={n}, k={k}")
    sizes = balanced_partition(n, k)
    return Fraction(n * n - sum(s * s for s in sizes), 2 * n * (n - 1))
