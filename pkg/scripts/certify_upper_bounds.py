"""Re-derive the upper-bound certificates and optionally rewrite the no-ITS
graph fixtures used by the tests.

    python3 scripts/certify_upper_bounds.py
    python3 scripts/certify_upper_bounds.py --write tests/fixtures
"""
import argparse
import json
from pathlib import Path

from graphmms.counterexamples import (certify_pairwise_intersections, gen_subadditive_upper,
                                      gen_xos_pmms_upper, gen_xos_upper, no_whole_bundle_selection,
                                      xos_upper_canon)
from graphmms.its import block_metrics, count_transversals_brute, delta, k22_block_graph, search_no_its
from graphmms.oracle import best_minmax_ratio, verify

TARGETS = [(3, 3, 3), (4, 4, 3)]


def certify_graph(label, g, b):
    m = block_metrics(g)
    inst = gen_xos_upper(g, b)
    cap = max(len(inst.incident(i)) for i in range(1, inst.n + 1))
    best, _ = best_minmax_ratio(inst, mode="frugal", canon=xos_upper_canon(inst), cap=max(cap, 14))
    print(f"{label}: {len(g.edges)} edges, max degree {m.max_degree}, "
          f"transversals left {count_transversals_brute(g)}, "
          f"no whole-bundle selection {no_whole_bundle_selection(inst)}, best frugal ratio {best}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--write", type=Path, help="directory to write no_its_r*_d*_b*.json into")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--time-limit", type=float, default=60.0)
    args = ap.parse_args()

    certify_graph("k22 graph, b=4", k22_block_graph(), 4)
    for r, d, b in TARGETS:
        g = search_no_its(r, d, b, seed=args.seed, time_limit=args.time_limit)
        if g is None:
            print(f"r={r} d={d} b={b}: nothing found")
            continue
        certify_graph(f"searched r={r} d={d} b={b} (delta_{r}({d}) = {delta(r, d)})", g, b)
        if args.write:
            path = args.write / f"no_its_r{r}_d{d}_b{b}.json"
            path.write_text(json.dumps(g.to_json(), indent=1, sort_keys=True) + "\n")
            print(f"  wrote {path}")

    inst = gen_subadditive_upper(2)
    best, _ = best_minmax_ratio(inst, mode="allocations")
    print(f"subadditive upper n=2: best allocation ratio {best}")
    cert = certify_pairwise_intersections(gen_subadditive_upper(3))
    print(f"subadditive upper n=3: pairwise certificate {cert.ok} over {cert.checked_pairs} pairs")

    inst, alloc = gen_xos_pmms_upper()
    best, _ = best_minmax_ratio(inst, mode="orientations", measure="pmms")
    print(f"xos pmms upper: best orientation PMMS ratio {best}, "
          f"explicit allocation {verify(inst, alloc).min_pmms_ratio}")


if __name__ == "__main__":
    main()
