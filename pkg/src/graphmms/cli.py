"""Command-line front end.

Exit codes: 0 guarantee satisfied, 1 guarantee violated, 2 usage or parse
error, 3 search cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import additive, counterexamples, its, subadditive, xos
from .model import (CapExceeded, InstanceError, allocation_from_dict, allocation_to_dict, dumps,
                    format_rational, orient_leftovers, parse_instance, parse_rational,
                    serialize_instance)
from .oracle import DEFAULT_CAP, best_minmax_ratio, compute_mms, verify
from .random_instances import FAMILIES, RandomConfig, random_instance

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# algorithms and their advertised guarantees

@dataclass(frozen=True)
class Guarantee:
    d: int
    alpha: Fraction
    measure: str = "mms"  # or "pmms" or "both"
    frugal: bool = False


def _guarantee(name: str, n: int, d: int | None) -> Guarantee:
    if name == "cut-choose":
        return Guarantee(n, Fraction(1), "both")
    if name == "greedy":
        return Guarantee(3, Fraction(1))
    if name in ("xos-2", "xos-3"):
        dd = d or (2 if name == "xos-2" else 3)
        return Guarantee(dd, 1 - Fraction(1, dd), frugal=True)
    if name == "xos-half2":
        return Guarantee(2, Fraction(1, 2), frugal=True)
    if name == "xos-23":
        return Guarantee(n, Fraction(2, 3), frugal=True)
    if name == "sub-half":
        return Guarantee(n, Fraction(1, 2), frugal=True)
    if name == "sub-pmms":
        return Guarantee(n, Fraction(1, 2), "pmms")
    if name == "exhaustive":
        return Guarantee(d or n, Fraction(0))
    raise UsageError(f"unknown algorithm {name!r}")


ALGORITHMS = ("cut-choose", "greedy", "xos-2", "xos-3", "xos-half2", "xos-23",
              "sub-half", "sub-pmms", "exhaustive")


def run_algorithm(name: str, inst, d: int | None = None, mode: str = "orientations"):
    """Returns (allocation, trace dict or None)."""
    if name == "cut-choose":
        alloc, tr = additive.cut_and_choose(inst)
        return alloc, tr.to_dict()
    if name == "greedy":
        alloc, tr = additive.greedy_max_edge(inst)
        return alloc, tr.to_dict()
    if name == "xos-2":
        return xos.xos_two_agents(inst, d or 2), None
    if name == "xos-3":
        return xos.xos_three_agents(inst, d or 3), None
    if name == "xos-half2":
        alloc, tr = xos.xos_half_out_of_two(inst, with_trace=True)
        return alloc, {"binding": {str(k): v for k, v in sorted(tr.binding.items())},
                       "rounds": [[r.agent, r.edge] for r in tr.rounds]}
    if name == "xos-23":
        res = xos.construct_two_thirds_traced(inst)
        return res.allocation, {"methods": dict(sorted(res.methods.items())),
                                "fallback": res.fallback}
    if name == "sub-half":
        res = subadditive.subadditive_half_mms_traced(inst)
        return res.allocation, {"subproblems": res.calls,
                                "branches": dict(sorted(subadditive.recursion_summary(res).items()))}
    if name == "sub-pmms":
        alloc, tr = subadditive.subadditive_half_pmms(inst)
        return alloc, tr.to_dict()
    if name == "exhaustive":
        r, alloc = best_minmax_ratio(inst, d, mode=mode)
        return alloc, {"best_ratio": format_rational(r), "mode": mode}
    raise UsageError(f"unknown algorithm {name!r}")


def check_guarantee(report, g: Guarantee) -> list[str]:
    problems = []
    for a in report.agents:
        if g.measure in ("mms", "both") and a.mms_ratio < g.alpha:
            problems.append(f"agent {a.agent}: value {format_rational(a.value)} < "
                            f"{format_rational(g.alpha)} * mu {format_rational(a.mu)}")
        if g.measure in ("pmms", "both") and a.pmms_ratio is not None and a.pmms_ratio < g.alpha:
            problems.append(f"agent {a.agent}: value {format_rational(a.value)} < "
                            f"{format_rational(g.alpha)} * PMMS {format_rational(a.pmms_threshold)}")
    if g.frugal and not report.is_frugal:
        problems.append("allocation is not frugal")
    if not report.is_orientation:
        problems.append("allocation is not an orientation")
    return problems


# --------------------------------------------------------------------------
# I/O helpers

def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str | bytes) -> None:
    data = text.encode("utf-8") if isinstance(text, str) else text
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _table(report) -> str:
    lines = ["agent  mu        value     mms_ratio  pmms_ratio  frugal"]
    for a in report.agents:
        pr = "-" if a.pmms_ratio is None else format_rational(a.pmms_ratio)
        fi = "-" if a.frugal_index is None else str(a.frugal_index)
        lines.append(f"{a.agent:<6} {format_rational(a.mu):<9} {format_rational(a.value):<9} "
                     f"{format_rational(a.mms_ratio):<10} {pr:<11} {fi}")
    lines.append(f"orientation={report.is_orientation} partition={report.is_partition} "
                 f"frugal={report.is_frugal}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# subcommands

def cmd_gen(args) -> int:
    if args.preset and args.random:
        raise UsageError("choose either --preset or --random")
    if args.preset:
        p = args.preset
        if p == "greedy-bad":
            inst = counterexamples.gen_greedy_bad(args.n or 5)
        elif p == "complete-unit":
            inst = counterexamples.gen_complete_unit(args.n or 3)
        elif p == "mms-not-pmms":
            inst, _ = counterexamples.gen_mms_not_pmms(parse_rational(args.M))
        elif p == "xos-pmms-upper":
            inst, _ = counterexamples.gen_xos_pmms_upper(args.pad)
        elif p == "subadditive-upper":
            inst = counterexamples.gen_subadditive_upper(args.n or 2)
        elif p == "xos-upper":
            g = its.k22_block_graph() if args.graph in (None, "k22") else its.parse_graph(_read(args.graph))
            inst = counterexamples.gen_xos_upper(g, args.b)
        elif p == "k22-witness":
            inst = counterexamples.gen_k22_witness()
        else:
            raise UsageError(f"unknown preset {p!r}")
    elif args.random:
        cfg = RandomConfig(n=args.n or 4, m=args.m, max_weight=args.max_weight,
                           clauses=args.clauses, max_degree=args.max_degree)
        inst = random_instance(args.random, cfg, args.seed)
    else:
        raise UsageError("gen needs --preset or --random")
    _write(args.out, serialize_instance(inst))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.instance))
    g = _guarantee(args.algorithm, inst.n, args.d)
    alloc, trace = run_algorithm(args.algorithm, inst, args.d, args.mode)
    if args.orient_leftovers:
        alloc = orient_leftovers(inst.graph, alloc)
        g = Guarantee(g.d, g.alpha, g.measure, False)
    report = verify(inst, alloc, d=g.d, pmms=not args.no_pmms or g.measure != "mms")
    problems = check_guarantee(report, g)
    out = {"algorithm": args.algorithm, "allocation": allocation_to_dict(alloc),
           "report": report.to_dict(), "guarantee": {
               "d": g.d, "alpha": format_rational(g.alpha), "measure": g.measure,
               "frugal": g.frugal, "holds": not problems, "violations": problems}}
    if args.trace:
        out["trace"] = trace
    if args.out:
        _write(args.out, dumps(allocation_to_dict(alloc)))
    _write(None, dumps(out))
    if not args.quiet:
        sys.stderr.write(_table(report))
    for p in problems:
        sys.stderr.write(f"violation: {p}\n")
    return EXIT_VIOLATED if problems else EXIT_OK


def cmd_verify(args) -> int:
    inst = parse_instance(_read(args.instance))
    try:
        alloc = allocation_from_dict(json.loads(_read(args.allocation)))
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed allocation JSON: {exc}") from exc
    alloc.validate(inst.graph)
    if alloc.n != inst.n:
        raise UsageError(f"allocation has {alloc.n} bundles for {inst.n} agents")
    report = verify(inst, alloc, d=args.d)
    alpha = parse_rational(args.alpha)
    g = Guarantee(report.d, alpha, args.measure)
    problems = [p for p in check_guarantee(report, g) if "orientation" not in p]
    _write(None, dumps({"report": report.to_dict(), "alpha": format_rational(alpha),
                        "measure": args.measure, "holds": not problems}))
    if not args.quiet:
        sys.stderr.write(_table(report))
    for p in problems:
        sys.stderr.write(f"violation: {p}\n")
    return EXIT_VIOLATED if problems else EXIT_OK


BENCH_COLUMNS = ("trial", "seed", "algorithm", "n", "m", "d", "agent", "mu", "value",
                 "mms_ratio", "pmms_ratio", "frugal", "orientation", "micros")


def _bench_trial(job):
    family, cfg, seed, trial, algorithms, timing = job
    inst = random_instance(family, cfg, seed)
    rows, failures = [], []
    for name in algorithms:
        g = _guarantee(name, inst.n, None)
        t0 = time.perf_counter()
        alloc, _ = run_algorithm(name, inst)
        micros = int((time.perf_counter() - t0) * 1e6)
        report = verify(inst, alloc, d=g.d, pmms=True)
        for p in check_guarantee(report, g):
            failures.append(f"trial {trial} {name}: {p}")
        for a in report.agents:
            rows.append((trial, seed, name, inst.n, inst.m, g.d, a.agent, format_rational(a.mu),
                         format_rational(a.value), format_rational(a.mms_ratio),
                         format_rational(a.pmms_ratio), int(report.is_frugal),
                         int(report.is_orientation), micros if timing else ""))
    return trial, rows, failures


def bench_rows(family: str, cfg: RandomConfig, trials: int, seed: int, algorithms, timing=False,
               jobs: int = 1):
    work = [(family, cfg, seed + t, t, tuple(algorithms), timing) for t in range(trials)]
    if jobs > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_trial, work))
    else:
        results = [_bench_trial(w) for w in work]
    results.sort(key=lambda r: r[0])
    rows = [row for _, rs, _ in results for row in rs]
    failures = [f for _, _, fs in results for f in fs]
    return rows, failures


def cmd_bench(args) -> int:
    cfg = RandomConfig(n=args.n, m=args.m, max_weight=args.max_weight, clauses=args.clauses,
                       max_degree=args.max_degree)
    algorithms = args.algorithms.split(",")
    for a in algorithms:
        _guarantee(a, args.n, None)
    rows, failures = bench_rows(args.family, cfg, args.trials, args.seed, algorithms,
                                args.timing, args.jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    w.writerows(rows)
    _write(args.out, buf.getvalue())
    for f in failures:
        sys.stderr.write(f"violation: {f}\n")
    return EXIT_VIOLATED if failures else EXIT_OK


def cmd_its(args) -> int:
    if args.delta:
        n, d = args.delta
        try:
            _write(None, dumps({"n": n, "d": d, "delta": its.delta(n, d)}))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return EXIT_OK
    if args.search:
        r, d, b = args.search
        g = its.search_no_its(r, d, b, budget=args.budget, seed=args.seed, use_ilp=not args.no_ilp)
        _write(None, dumps({"search": [r, d, b], "graph": None if g is None else g.to_json()}))
        return EXIT_OK
    if args.graph is None:
        raise UsageError("its needs a graph file, 'k22', --search or --delta")
    g = its.k22_block_graph() if args.graph == "k22" else its.parse_graph(_read(args.graph))
    picks = its.find_its(g, args.size)
    m = its.block_metrics(g)
    _write(None, dumps({
        "size": args.size,
        "its": None if picks is None else [list(p) for p in picks],
        "metrics": {"avg_degree": [format_rational(x) for x in m.avg_degree],
                    "max_block_avg": format_rational(m.max_block_avg),
                    "thickness": m.thickness, "max_degree": m.max_degree,
                    "max_edges_between_parts": m.max_edges_between_parts}}))
    return EXIT_OK


def cmd_mms(args) -> int:
    inst = parse_instance(_read(args.instance))
    ds = args.d or [inst.n]
    out = []
    for i in range(1, inst.n + 1):
        for d in ds:
            r = compute_mms(inst, i, d, args.cap)
            out.append({"agent": i, "d": d, "mu": format_rational(r.mu),
                        "canonical": [sorted(p) for p in r.canonical.parts]})
    _write(None, dumps({"mms": out}))
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphmms", description="MMS and PMMS allocation on multigraphs")
    ap.add_argument("--format", default="json", choices=("json",),
                    help="output format for reports (json only)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write an instance")
    g.add_argument("--preset", choices=counterexamples.PRESETS + ("k22-witness",))
    g.add_argument("--random", choices=sorted(FAMILIES))
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int, default=8)
    g.add_argument("--max-weight", type=int, default=10)
    g.add_argument("--clauses", type=int, default=3)
    g.add_argument("--max-degree", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--M", default="10", help="heavy weight for mms-not-pmms")
    g.add_argument("--pad", type=int, default=0, help="isolated agents for xos-pmms-upper")
    g.add_argument("--graph", help="multipartite graph JSON for xos-upper (default k22)")
    g.add_argument("--b", type=int, default=4, help="bundle size for xos-upper")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run an algorithm and check its guarantee")
    s.add_argument("instance")
    s.add_argument("--algorithm", "-a", required=True, choices=ALGORITHMS)
    s.add_argument("--d", type=int)
    s.add_argument("--mode", default="orientations", choices=("allocations", "orientations", "frugal"),
                   help="search space for the exhaustive algorithm")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--orient-leftovers", action="store_true",
                   help="give unallocated edges to their lower endpoint (drops frugality)")
    s.add_argument("--no-pmms", action="store_true", help="skip PMMS thresholds in the report")
    s.add_argument("--out", help="also write the allocation JSON here")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="fairness report for an allocation")
    v.add_argument("instance")
    v.add_argument("allocation")
    v.add_argument("--d", type=int)
    v.add_argument("--alpha", default="1")
    v.add_argument("--measure", default="mms", choices=("mms", "pmms", "both"))
    v.add_argument("--quiet", action="store_true")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="CSV of ratios over a random family")
    b.add_argument("--family", default="additive", choices=sorted(FAMILIES))
    b.add_argument("--algorithms", default="cut-choose,greedy")
    b.add_argument("--n", type=int, default=4)
    b.add_argument("--m", type=int, default=8)
    b.add_argument("--max-weight", type=int, default=10)
    b.add_argument("--clauses", type=int, default=3)
    b.add_argument("--max-degree", type=int, default=10)
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--timing", action="store_true", help="fill the micros column")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("its", help="independent transversal utilities")
    t.add_argument("graph", nargs="?", help="multipartite graph JSON or 'k22'")
    t.add_argument("--size", type=int, default=1)
    t.add_argument("--search", type=int, nargs=3, metavar=("R", "D", "B"))
    t.add_argument("--budget", type=int, default=20)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--no-ilp", action="store_true")
    t.add_argument("--delta", type=int, nargs=2, metavar=("N", "D"))
    t.set_defaults(func=cmd_its)

    mm = sub.add_parser("mms", help="MMS values and canonical partitions")
    mm.add_argument("instance")
    mm.add_argument("--d", type=int, action="append")
    mm.add_argument("--cap", type=int, default=DEFAULT_CAP)
    mm.set_defaults(func=cmd_mms)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CapExceeded as exc:
        sys.stderr.write(f"cap exceeded: {exc}\n")
        return EXIT_CAP
    except (UsageError, InstanceError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
