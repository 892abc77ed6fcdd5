"""Command-line entry point: ``korder solve|gap|verify|gen``.

Exit codes: 0 success, 1 usage or parse error, 2 verification failure,
3 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bruteforce, ded, maxk, rmas, suites
from .graph import CyclicGraphError, forward_weight
from .instances import (RNG_NAME, InstanceFormatError, OrderingInstance, complete_digraph, emit, parse,
                        random_dag, random_digraph, random_rmas, sampled_sparse)
from .lp import LpError

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CAP = 0, 1, 2, 3

METHODS = {
    "maxk": ("lp-round", "derand", "random", "brute"),
    "rmas": ("lp-round", "random", "brute"),
    "ded": ("local-ratio", "lp-threshold", "brute"),
}
DEFAULT_METHOD = {"maxk": "lp-round", "rmas": "lp-round", "ded": "local-ratio"}

SOLVE_COLUMNS = ("problem", "method", "seed", "n", "m", "k", "lp_objective", "value", "value_fraction",
                 "ratio_to_lp", "violations")
GAP_COLUMNS = ("n", "k", "lp_fraction", "opt_fraction", "gap", "gap_limit", "opt_source")
VERIFY_COLUMNS = ("suite", "checks", "failures", "passed")
GEN_PARAMS = {
    "complete": ("n", "k", "problem"),
    "sampled": ("n", "m", "k", "problem"),
    "digraph": ("n", "m", "k", "problem", "max_weight"),
    "dag": ("n", "p", "k", "problem", "max_weight"),
    "rmas": ("n", "m", "max_label", "max_offset", "max_set_size", "max_weight"),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _trial_seeds(seed: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(trials)


def _violations(guarantees) -> list[dict]:
    return [{"edge": g.edge, "probability": g.probability, "z": g.z, "bound": g.bound}
            for g in guarantees if not g.holds]


def _trial_summary(values: list[float], expected: float) -> dict:
    return {"count": len(values), "best": max(values), "mean": float(np.mean(values)), "expected": expected}


def solve_maxk(inst: OrderingInstance, method: str, trials: int, seed: int) -> dict:
    g, k = inst.g, inst.k
    rep: dict = {"lp_objective": None, "trials": None, "metadata": {}, "guarantee_violations": []}
    if method in ("lp-round", "derand"):
        sol = maxk.solve_maxk_lp(g, k)
        rep["lp_objective"] = sol.objective
        rep["guarantee_violations"] = _violations(maxk.per_edge_guarantee(g, sol))
        expected = maxk.expected_rounded_value(g, sol)
        rep["metadata"]["expected_rounded_value"] = expected
        if method == "lp-round":
            best_labels, values = None, []
            for s in _trial_seeds(seed, trials):
                labels = maxk.round_ordering(sol, s)
                val = forward_weight(g, labels)
                if best_labels is None or val > max(values):
                    best_labels = labels
                values.append(val)
            rep["trials"] = _trial_summary(values, expected)
            labels = best_labels
        else:
            labels = maxk.derandomize(g, sol)
    elif method == "random":
        best_labels, values = None, []
        for s in _trial_seeds(seed, trials):
            labels = maxk.random_k_ordering(g, k, s)
            val = forward_weight(g, labels)
            if best_labels is None or val > max(values):
                best_labels = labels
            values.append(val)
        expected = g.total_weight() * maxk.random_ordering_edge_probability(k)
        rep["trials"] = _trial_summary(values, expected)
        labels = best_labels
    else:
        _, labels = bruteforce.brute_maxk(g, k)
    rep["value"] = forward_weight(g, labels)
    rep["solution"] = {"labels": labels}
    return rep


def solve_rmas(inst: rmas.RmasInstance, method: str, trials: int, seed: int) -> dict:
    pre, removed = rmas.preprocess(inst)
    sat = rmas.satisfiable_weight(pre)
    rep: dict = {"lp_objective": None, "trials": None, "guarantee_violations": [],
                 "metadata": {"removed_edges": removed, "satisfiable_weight": sat}}
    if method == "lp-round":
        sol = rmas.solve_rmas_lp(pre)
        rep["lp_objective"] = sol.objective
        rep["guarantee_violations"] = _violations(rmas.per_edge_rmas_guarantee(pre, sol))
        expected = rmas.expected_rmas_value(pre, sol)
        rep["metadata"]["expected_rounded_value"] = expected
        sampler = lambda s: rmas.round_offset_labels(sol, s)  # noqa: E731
    elif method == "random":
        expected = rmas.minmax_expected_value(pre)
        rep["metadata"]["expected_value"] = expected
        rep["metadata"]["quarter_satisfiable"] = sat / 4
        if expected < sat / 4 - 1e-9:
            rep["guarantee_violations"].append({"edge": -1, "probability": expected, "z": sat, "bound": sat / 4})
        sampler = lambda s: rmas.minmax_baseline(pre, s)  # noqa: E731
    else:
        _, labels = bruteforce.brute_rmas(pre)
        sampler = None
    if sampler is not None:
        best_labels, values = None, []
        for s in _trial_seeds(seed, trials):
            labels = sampler(s)
            val = inst.value(labels)
            if best_labels is None or val > max(values):
                best_labels = labels
            values.append(val)
        rep["trials"] = _trial_summary(values, expected)
        labels = best_labels
    rep["value"] = inst.value(labels)
    rep["solution"] = {"labels": labels}
    return rep


def solve_ded(inst: OrderingInstance, method: str) -> dict:
    g, k = inst.g, inst.k
    rep: dict = {"lp_objective": None, "trials": None, "metadata": {}, "guarantee_violations": []}
    if method == "local-ratio":
        sol = ded.local_ratio(g, k)
    elif method == "lp-threshold":
        lp = ded.solve_ded_lp(g, k)
        rep["lp_objective"] = lp.objective
        rep["metadata"]["row_generation_rounds"] = lp.rounds
        sol = ded.threshold_round(g, k, lp.x)
    else:
        cost, deleted = bruteforce.brute_ded(g, k)
        sol = ded.DedSolution(deleted, cost, "brute_force")
    if not sol.is_feasible(g, k):
        rep["guarantee_violations"].append({"edge": -1, "probability": 0.0, "z": 0.0, "bound": 0.0})
    rep["value"] = sol.cost
    rep["solution"] = {"deleted": sorted(sol.deleted)}
    return rep


def cmd_solve(args) -> tuple[dict, int]:
    problem = args.problem
    method = args.method or DEFAULT_METHOD[problem]
    if method not in METHODS[problem]:
        raise UsageError(f"method {method!r} does not apply to {problem}; choose from {', '.join(METHODS[problem])}")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    inst = parse(Path(args.instance), kind="ded" if problem == "ded" else problem)
    if args.k is not None:
        if problem == "rmas":
            raise UsageError("--k does not apply to rmas instances")
        inst = OrderingInstance(inst.kind, inst.g, args.k)
    start = time.perf_counter()
    if problem == "maxk":
        rep = solve_maxk(inst, method, args.trials, args.seed)
    elif problem == "rmas":
        rep = solve_rmas(inst, method, args.trials, args.seed)
    else:
        rep = solve_ded(inst, method)
    elapsed = time.perf_counter() - start
    g = inst.g
    total = g.total_weight()
    lp_obj = rep.pop("lp_objective")
    report = {
        "command": "solve",
        "problem": problem,
        "method": method,
        "seed": args.seed,
        "instance": {"path": Path(args.instance).name, "n": g.n, "m": g.m,
                     "k": getattr(inst, "k", None), "total_weight": total},
        "lp_objective": lp_obj,
        "value": rep["value"],
        "value_fraction": rep["value"] / total if total > 0 else None,
        "lp_fraction": lp_obj / total if lp_obj is not None and total > 0 else None,
        "ratio_to_lp": rep["value"] / lp_obj if lp_obj else None,
        "guarantee_violations": rep["guarantee_violations"],
        "trials": rep["trials"],
        "solution": rep["solution"],
        "metadata": rep["metadata"],
    }
    if args.timing:
        report["wall_time_s"] = elapsed
    return report, EXIT_VERIFY if report["guarantee_violations"] else EXIT_OK


def _int_range(text: str) -> list[int]:
    """``"3-8"`` or ``"2,3,5"`` or ``"4"``."""
    out: list[int] = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def cmd_gap(args) -> tuple[dict, int]:
    try:
        ns, ks = _int_range(args.n), _int_range(args.k)
    except ValueError:
        raise UsageError("--n and --k take ranges like 3-8 or lists like 2,3,5") from None
    rows = suites.gap_rows(ns, ks, brute_limit=args.brute_limit)
    return {"command": "gap", "rows": rows}, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        if name == "inequality":
            reports.append(suites.run_mass_inequality(args.per_pair, args.seed))
        elif name == "rounding":
            reports.append(suites.run_rounding(args.count, args.seed))
        else:
            reports.append(suites.run_ded(args.ded_count, args.seed))
    passed = all(r["passed"] for r in reports)
    return {"command": "verify", "seed": args.seed, "passed": passed, "suites": reports}, \
        EXIT_OK if passed else EXIT_VERIFY


def cmd_gen(args) -> tuple[str, int]:
    kind = args.kind
    params = {name: getattr(args, name) for name in GEN_PARAMS[kind] if getattr(args, name) is not None}
    if kind == "complete":
        inst = OrderingInstance(args.problem or "maxk", complete_digraph(args.n), args.k)
    elif kind == "sampled":
        inst = OrderingInstance(args.problem or "maxk", sampled_sparse(args.n, args.m, args.seed), args.k)
    elif kind == "digraph":
        inst = OrderingInstance(args.problem or "maxk",
                                random_digraph(args.n, args.m, args.seed, args.max_weight), args.k)
    elif kind == "dag":
        inst = OrderingInstance(args.problem or "ded", random_dag(args.n, args.p, args.seed, args.max_weight), args.k)
    else:
        inst = random_rmas(args.n, args.m, args.max_label, args.max_offset, args.seed,
                           max_set_size=args.max_set_size, max_weight=args.max_weight)
    comments = [f"generator: {kind}",
                "params: " + " ".join(f"{k}={params[k]}" for k in sorted(params)),
                f"seed: {args.seed}", f"rng: {RNG_NAME}"]
    return emit(inst, comments), EXIT_OK


def _tsv(report: dict) -> str:
    cmd = report["command"]
    if cmd == "solve":
        rows = [{**report, **{"n": report["instance"]["n"], "m": report["instance"]["m"],
                              "k": report["instance"]["k"], "violations": len(report["guarantee_violations"])}}]
        cols = SOLVE_COLUMNS
    elif cmd == "gap":
        rows, cols = report["rows"], GAP_COLUMNS
    else:
        rows, cols = report["suites"], VERIFY_COLUMNS

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = ["\t".join(cols)] + ["\t".join(cell(r.get(c)) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="korder", description="LP-rounding algorithms for digraph ordering and DAG edge deletion")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output_flags(sp):
        sp.add_argument("--format", choices=("json", "tsv"), default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("problem", choices=tuple(METHODS))
    s.add_argument("instance")
    s.add_argument("--method", choices=sorted({m for ms in METHODS.values() for m in ms}))
    s.add_argument("--k", type=int)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--timing", action="store_true", help="include wall time (makes output run-dependent)")
    output_flags(s)
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gap", help="integrality-gap table on complete digraphs")
    g.add_argument("--n", default="3-8")
    g.add_argument("--k", default="2-8")
    g.add_argument("--brute-limit", type=int, default=8, help="largest n checked by exhaustive search")
    output_flags(g)
    g.set_defaults(func=cmd_gap)

    v = sub.add_parser("verify", help="run seeded property suites")
    v.add_argument("suite", choices=("inequality", "rounding", "ded", "all"))
    v.add_argument("--count", type=int, default=200, help="instances per rounding family")
    v.add_argument("--ded-count", type=int, default=100)
    v.add_argument("--per-pair", type=int, default=1000, help="matrices per (k, offset) pair")
    v.add_argument("--seed", type=int, default=0)
    output_flags(v)
    v.set_defaults(func=cmd_verify)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("kind", choices=("complete", "sampled", "digraph", "dag", "rmas"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int)
    gen.add_argument("--k", type=int, default=2)
    gen.add_argument("--p", type=float, default=0.3)
    gen.add_argument("--problem", choices=("maxk", "ded"))
    gen.add_argument("--max-label", type=int, default=5)
    gen.add_argument("--max-offset", type=int, default=1)
    gen.add_argument("--max-set-size", type=int)
    gen.add_argument("--max-weight", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen, format="text")
    return p


def _needs_m(args) -> bool:
    return args.command == "gen" and args.kind in ("sampled", "digraph", "rmas") and args.m is None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if _needs_m(args):
            parser.error(f"gen {args.kind} requires --m")
    except SystemExit as exc:  # --help and usage errors
        return exc.code
    try:
        result, code = args.func(args)
    except UsageError as exc:
        print(f"korder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceFormatError, OSError, CyclicGraphError, ValueError) as exc:
        print(f"korder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except bruteforce.CapExceededError as exc:
        print(f"korder: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (LpError, ded.RowGenerationLimitError, ded.InfeasibleRoundingError) as exc:
        print(f"korder: solver failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if isinstance(result, str):
        text = result
    elif args.format == "tsv":
        text = _tsv(result)
    else:
        text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
