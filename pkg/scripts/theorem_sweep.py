"""Dilate many seeded random systems and tabulate the worst defects per size.

Run with:
    python3 scripts/theorem_sweep.py --systems 50 --max-n 6 --times 8
"""
import argparse
import time

import numpy as np

from unistoq import dilate_system, random_stochastic_system
from unistoq.dilation import dilation_defects


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=50)
    ap.add_argument("--min-n", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--times", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sizes = list(range(args.min_n, args.max_n + 1))
    grid = [0.5 * k for k in range(args.times)]
    rows = {n: np.zeros(4) for n in sizes}
    counts = dict.fromkeys(sizes, 0)
    start = time.perf_counter()
    for k in range(args.systems):
        n = sizes[k % len(sizes)]
        system = random_stochastic_system(n, grid, seed=args.seed + k)
        d = dilate_system(system)
        defects = dilation_defects(d, system)
        worst = [defects.unitarity, defects.double_stochasticity, defects.marginalization, defects.anchor_spread]
        rows[n] = np.maximum(rows[n], worst)
        counts[n] += 1
    elapsed = time.perf_counter() - start

    print(f"{'N':>3} {'dim':>5} {'systems':>8} {'unitarity':>11} {'dbl-stoch':>11} {'marginal':>11} {'spread':>11}")
    for n in sizes:
        u, s, m, a = rows[n]
        print(f"{n:>3} {n**3:>5} {counts[n]:>8} {u:>11.2e} {s:>11.2e} {m:>11.2e} {a:>11.2e}")
    print(f"total {args.systems} systems x {args.times} times in {elapsed:.2f} s")


if __name__ == "__main__":
    main()
