"""Command-line front end.

Exit codes: 0 success, 1 parse error, 2 validation or usage error,
3 numerical tolerance failure.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis, generators
from .config import TOL, Limits
from .core import StochasticSystem, TimeGrid, evolve_probabilities, validate_system
from .dilation import dilate_system, dilation_defects
from .documents import (
    DocumentError,
    SystemDocument,
    complex_matrix_csv,
    fmt,
    load_document,
    probability_table_csv,
    real_matrix_csv,
    write_atomic,
)
from .errors import CompletionError, NumericalInvariantError, UnistoqError, UnknownTimeError

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_TOLERANCE = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        self.code, self.message = code, message


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_valid(path: str) -> tuple[SystemDocument, StochasticSystem]:
    try:
        doc = load_document(path)
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"PARSE ERROR {path}: {exc}") from None
    except DocumentError as exc:
        raise _Exit(EXIT_PARSE, f"PARSE ERROR {path}: {exc}") from None
    system = doc.to_system()
    report = validate_system(system)
    if not report.ok:
        raise _Exit(EXIT_INVALID, "\n".join(f"VIOLATION {v}" for v in report))
    return doc, system


def _grid_time(system: StochasticSystem, raw: str) -> float:
    try:
        t = float(raw)
    except ValueError:
        raise _Exit(EXIT_INVALID, f"not a time: {raw!r}") from None
    if t not in system.grid:
        raise _Exit(EXIT_INVALID, str(UnknownTimeError(t, system.times)))
    return t


def _matrix_lines(m: np.ndarray, indent: str = "    ") -> list[str]:
    return [indent + " ".join(f"{x: .6f}" for x in row) for row in np.asarray(m)]


# ---------------------------------------------------------------------------
# verbs


def cmd_validate(args) -> int:
    _load_valid(args.path)
    print("OK")
    return EXIT_OK


def cmd_evolve(args) -> int:
    _, system = _load_valid(args.path)
    probs = [evolve_probabilities(system, t) for t in system.times]
    text = probability_table_csv(system.times, probs)
    if args.csv:
        write_atomic(args.csv, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_dilate(args) -> int:
    doc, system = _load_valid(args.path)
    limits = Limits.from_env()
    if system.n > limits.max_dilation_n:
        raise _Exit(EXIT_INVALID, f"n={system.n} exceeds the dilation cap {limits.max_dilation_n}")
    phases = doc.phase_tables()
    for t, table in phases.items():
        if t not in system.grid:
            raise _Exit(EXIT_INVALID, f"phases: {UnknownTimeError(t, system.times)}")
        if table.shape != (system.n, system.n):
            raise _Exit(EXIT_INVALID, f"phases[{fmt(t)}]: shape {table.shape}, expected {(system.n, system.n)}")
        if t == 0 and np.any(table != 0):
            raise _Exit(EXIT_INVALID, "phases at time 0 must vanish so that Theta(0) is the identity")
    try:
        dsys = dilate_system(system, phases, limits=limits)
    except (NumericalInvariantError, CompletionError) as exc:
        print(f"dilation failed: {exc}")
        print("SUBSYSTEM-OF-UNISTOCHASTIC: FAIL")
        return EXIT_TOLERANCE
    defects = dilation_defects(dsys, system)
    passed = defects.passes(TOL.unitarity)
    lines = [
        f"n = {dsys.n}, ancilla_dim = {dsys.ancilla_dim}, total_dim = {dsys.total_dim}, "
        f"times = {len(dsys.times)}",
        f"unitarity defect: {defects.unitarity:.3e}",
        f"double-stochasticity defect: {defects.double_stochasticity:.3e}",
        f"marginalization residual: {defects.marginalization:.3e}",
        f"anchored-index spread: {defects.anchor_spread:.3e}",
    ]
    if args.report:
        from .linalg import doubly_stochastic_defect, unitarity_defect

        for k, t in enumerate(dsys.times):
            lines.append(
                f"  t[{k}] = {fmt(t)}: unitarity {unitarity_defect(dsys.unitaries[t].entries):.3e}, "
                f"double-stochasticity {doubly_stochastic_defect(dsys.transitions[t]):.3e}"
            )
    lines.append(f"SUBSYSTEM-OF-UNISTOCHASTIC: {'PASS' if passed else 'FAIL'}")
    report = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        index_rows = ["index,time"]
        for k, t in enumerate(dsys.times):
            write_atomic(out / f"unitary_{k:03d}.csv", complex_matrix_csv(dsys.unitaries[t].entries))
            write_atomic(out / f"gamma_tilde_{k:03d}.csv", real_matrix_csv(dsys.transitions[t]))
            index_rows.append(f"{k},{fmt(t)}")
        write_atomic(out / "times.csv", "\n".join(index_rows) + "\n")
        write_atomic(out / "report.txt", report)
        summary = {
            "n": dsys.n,
            "ancilla_dim": dsys.ancilla_dim,
            "total_dim": dsys.total_dim,
            "unitarity_defect": defects.unitarity,
            "double_stochasticity_defect": defects.double_stochasticity,
            "marginalization_residual": defects.marginalization,
            "anchor_spread": defects.anchor_spread,
            "verdict": "PASS" if passed else "FAIL",
        }
        write_atomic(out / "report.json", json.dumps(summary, indent=2) + "\n")
    sys.stdout.write(report)
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_analyze(args) -> int:
    _, system = _load_valid(args.path)
    markov = _grid_time(system, args.markov) if args.markov is not None else None
    pairs = []
    for raw in args.divisibility or []:
        parts = raw.split(",")
        if len(parts) != 2:
            raise _Exit(EXIT_INVALID, f"--divisibility expects T,TPRIME, got {raw!r}")
        pairs.append(tuple(_grid_time(system, p) for p in parts))
    uni_times = [_grid_time(system, t) for t in (args.unistochastic or [])]
    if markov is None and not pairs and not uni_times:
        uni_times = list(system.times)

    if markov is not None:
        for k, res in analysis.check_markov_chain(system, markov):
            print(f"markov n={k} residual={res:.3e}")
    for t, tp in pairs:
        rep = analysis.solve_divisibility(system.gamma(t), system.gamma(tp))
        status = "FEASIBLE" if rep.feasible else "INFEASIBLE"
        print(
            f"divisibility t={fmt(t)} t'={fmt(tp)}: {status}, residual={rep.residual:.3e}, "
            f"iterations={rep.iterations}"
        )
        print("  witness X:")
        print("\n".join(_matrix_lines(rep.witness)))
    for t in uni_times:
        res = analysis.classify_unistochastic(system.gamma(t), restarts=args.restarts, seed=args.seed)
        label = res.verdict.upper()
        if res.method in ("3x3 criterion", "2x2 formula", "not doubly stochastic"):
            label += f" ({res.method.replace('3x3', '3×3')})"
        print(f"t={fmt(t)} unistochastic: {label}, defect={res.defect:.3e}")
    return EXIT_OK


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int | None = None) -> generators.PermutationSpec:
    """Parse 1-based cycle notation such as ``"(1 2)(3 4 5)"``."""
    if not re.fullmatch(r"(\s*\([\d\s,]*\)\s*)+", text):
        raise ValueError(f"bad cycle notation: {text!r}")
    cycles = [
        tuple(int(k) - 1 for k in re.split(r"[\s,]+", body.strip()) if k)
        for body in _CYCLE_RE.findall(text)
    ]
    if any(k < 0 for c in cycles for k in c):
        raise ValueError("cycle entries are 1-based positive integers")
    size = n if n is not None else max((k + 1 for c in cycles for k in c), default=0)
    return generators.PermutationSpec.from_cycles(size, cycles)


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _build_generated(args) -> StochasticSystem:
    kind = args.kind
    if kind == "permutation":
        if not args.cycles:
            raise ValueError("permutation needs --cycles")
        perm = parse_cycles(args.cycles, args.n)
        times = _float_list(args.times or "0,0.5,1,1.5,2")
        p0 = _float_list(args.p0) if args.p0 else np.full(perm.n, 1.0 / perm.n)
        return generators.permutation_unistochastic_system(perm, TimeGrid(times), args.dt, p0)
    if kind == "markov-chain":
        if args.gamma:
            base = np.array(json.loads(args.gamma), dtype=float)
        elif args.cycles:
            base = parse_cycles(args.cycles, args.n).matrix()
        else:
            raise ValueError("markov-chain needs --gamma or --cycles")
        p0 = _float_list(args.p0) if args.p0 else np.full(base.shape[0], 1.0 / base.shape[0])
        return generators.markov_chain_system(base, args.steps, p0, args.dt)
    if kind == "rds":
        n = args.n or 3
        times = _float_list(args.times or "0,1,2,3")
        rds = generators.random_finite_rds(n, TimeGrid(times), args.omegas, args.seed)
        p0 = _float_list(args.p0) if args.p0 else np.full(n, 1.0 / n)
        return generators.rds_to_stochastic_system(rds, p0)
    if kind == "random":
        n = args.n or 3
        times = _float_list(args.times or "0,1,2,3,4,5,6,7")
        system = generators.random_stochastic_system(n, TimeGrid(times), args.seed, args.variables)
        if args.p0:
            system = StochasticSystem(system.n, system.grid, system.transitions, _float_list(args.p0), system.variables)
        return system
    raise ValueError(f"unknown kind {kind!r}")


def cmd_generate(args, parser: argparse.ArgumentParser) -> int:
    try:
        system = _build_generated(args)
    except (ValueError, UnistoqError) as exc:
        parser.error(str(exc))
    text = SystemDocument.from_system(system).to_json()
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unistoq",
        description="Stochastic systems, their Hilbert-space representation and unistochastic dilation.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check a system document")
    p.add_argument("path")

    p = sub.add_parser("evolve", help="tabulate p(t) = Gamma(t) p(0)")
    p.add_argument("path")
    p.add_argument("--csv", metavar="OUT", help="write the CSV here instead of stdout")

    p = sub.add_parser("dilate", help="build the unistochastic dilation and check it")
    p.add_argument("path")
    p.add_argument("--out", metavar="DIR", help="directory for per-time CSV matrices and the report")
    p.add_argument("--report", action="store_true", help="include per-time defects")

    p = sub.add_parser("analyze", help="Markov, divisibility and unistochasticity checks")
    p.add_argument("path")
    p.add_argument("--markov", metavar="DT")
    p.add_argument("--divisibility", metavar="T,TPRIME", action="append")
    p.add_argument("--unistochastic", metavar="T", action="append")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("generate", help="write a generated system document")
    p.add_argument("kind", choices=["permutation", "markov-chain", "rds", "random"])
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--n", type=int)
    p.add_argument("--cycles", help='1-based cycle notation, e.g. "(1 2)(3 4 5)"')
    p.add_argument("--gamma", help="JSON row-major base matrix for markov-chain")
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--times", help="comma-separated grid, must contain 0")
    p.add_argument("--p0", help="comma-separated initial distribution")
    p.add_argument("--omegas", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variables", type=int, default=0)
    p.set_defaults(parser=p)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "generate":
            return cmd_generate(args, args.parser)
        return {
            "validate": cmd_validate,
            "evolve": cmd_evolve,
            "dilate": cmd_dilate,
            "analyze": cmd_analyze,
        }[args.verb](args)
    except _Exit as exc:
        if exc.message:
            _err(exc.message)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
