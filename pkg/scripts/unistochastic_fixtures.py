"""Classify the textbook doubly stochastic fixtures and random Birkhoff samples.

Compares the exact 3x3 criterion against the numerical search on random
convex combinations of permutation matrices.

Run with:
    python3 scripts/unistochastic_fixtures.py --samples 200
"""
import argparse
import itertools

import numpy as np

from unistoq.analysis import classify_unistochastic, search_unistochastic, unistochastic_verdict_3x3


def birkhoff_sample(rng: np.random.Generator, n: int, concentration: float) -> np.ndarray:
    perms = [np.eye(n)[list(p)] for p in itertools.permutations(range(n))]
    w = rng.dirichlet(np.full(len(perms), concentration))
    return sum(a * p for a, p in zip(w, perms))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--concentration", type=float, default=0.7)
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    fixtures = {
        "half circulant": 0.5 * np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float),
        "all ones / 3": np.full((3, 3), 1 / 3),
        "2x2, x = 0.3": np.array([[0.3, 0.7], [0.7, 0.3]]),
        "column stochastic only": np.array([[0.9, 0.5], [0.1, 0.5]]),
    }
    for name, m in fixtures.items():
        res = classify_unistochastic(m, restarts=args.restarts, seed=args.seed)
        print(f"{name:<24} {res.verdict:<8} method={res.method:<22} defect={res.defect:.3e}")

    rng = np.random.default_rng(args.seed)
    table = {}
    for k in range(args.samples):
        m = birkhoff_sample(rng, 3, args.concentration)
        exact = unistochastic_verdict_3x3(m).verdict
        found = search_unistochastic(m, restarts=args.restarts, seed=k).verdict
        table[exact, found] = table.get((exact, found), 0) + 1
    print(f"\n3x3 criterion vs search over {args.samples} Birkhoff samples:")
    for (exact, found), count in sorted(table.items()):
        print(f"  criterion {exact:<4} search {found:<8} {count}")


if __name__ == "__main__":
    main()
