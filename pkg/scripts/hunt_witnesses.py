"""Count how often the overconstrained branch of the 2/3 construction fires
on random XOS instances, with the recursive promise and with the adversarial
one, and how each witness was resolved.

    python3 scripts/hunt_witnesses.py --count 300 --n 4
"""
import argparse
from collections import Counter

from graphmms.random_instances import RandomConfig, random_xos
from graphmms.xos import (OverconstrainedWitness, _reduce, adversarial_promise,
                          allocate_from_witness, construct_two_thirds_traced,
                          detect_overconstrained)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--max-degree", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--adversarial", action="store_true",
                    help="also run detection with the adversarial promise (slow)")
    args = ap.parse_args()

    methods, adv = Counter(), Counter()
    cfg = RandomConfig(n=args.n, m=args.m, max_degree=args.max_degree)
    for k in range(args.count):
        inst = random_xos(cfg, args.seed + k)
        methods.update(construct_two_thirds_traced(inst).methods)
        if args.adversarial and args.n >= 4:
            fr = _reduce(inst, args.n)
            agents = tuple(range(1, args.n + 1))
            idx = {i: tuple(range(args.n)) for i in agents}
            res = detect_overconstrained(fr, agents, idx, adversarial_promise(fr, agents))
            if isinstance(res, OverconstrainedWitness):
                adv[allocate_from_witness(fr, res).method] += 1
            else:
                adv[res.method] += 1
    print("recursive construction, methods used:", dict(sorted(methods.items())))
    if args.adversarial:
        print("adversarial promise, top-level outcome:", dict(sorted(adv.items())))


if __name__ == "__main__":
    main()
