"""Interpolate a permutation by unitary powers and show the induced stochastic dynamics.

At integer multiples of dt the transition matrix is the permutation itself;
in between it is doubly stochastic but not a permutation, and the dynamics is
generated by a self-adjoint Hamiltonian.

Run with:
    python3 scripts/permutation_interpolation.py --cycles "(1 2 3)" --steps 8
"""
import argparse

import numpy as np

from unistoq.cli import parse_cycles
from unistoq.generators import hamiltonian_from_permutation, permutation_power_interpolation
from unistoq.linalg import expm_taylor


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cycles", default="(1 2 3)", help="1-based cycle notation")
    ap.add_argument("--dt", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=8, help="samples per dt")
    ap.add_argument("--periods", type=int, default=1)
    args = ap.parse_args()

    perm = parse_cycles(args.cycles)
    h = hamiltonian_from_permutation(perm, args.dt)
    np.set_printoptions(precision=4, suppress=True)
    print(f"permutation {args.cycles} on {perm.n} elements")
    print("Hamiltonian eigenvalues:", np.sort(np.linalg.eigvalsh(h)))
    p0 = np.zeros(perm.n)
    p0[0] = 1.0
    print(f"\n{'t':>6}  {'|exp(-iHt) - U(t)|':>20}  p(t) from p0 = e_1")
    for k in range(args.periods * args.steps + 1):
        t = k * args.dt / args.steps
        u = permutation_power_interpolation(perm, t, args.dt)
        gamma = np.abs(u) ** 2
        err = np.abs(expm_taylor(-1j * h * t) - u).max()
        print(f"{t:>6.3f}  {err:>20.2e}  {gamma @ p0}")


if __name__ == "__main__":
    main()
