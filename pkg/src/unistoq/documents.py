"""JSON system documents and CSV outputs.

A document looks like::

    {
      "n": 2,
      "times": [0.0, 0.5, 1.0],
      "gamma": {"0.0": [[1, 0], [0, 1]], "0.5": [[...], [...]], "1.0": ...},
      "p0": [0.5, 0.5],
      "variables": {"A": {"0.0": [1, -1], "0.5": [1, -1], "1.0": [1, -1]}},
      "phases": {"0.5": [[0, 0], [0, 3.14159]]}
    }

Matrices are row-major. Time keys are decimal strings whose value must equal
an entry of ``times`` exactly. ``variables`` and ``phases`` are optional.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .core import RandomVariable, StochasticSystem, TimeGrid


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


def time_key(t: float) -> str:
    return repr(float(t))


@dataclass(frozen=True)
class SystemDocument:
    n: int
    times: tuple[float, ...]
    gamma: Mapping[str, Any]
    p0: tuple[float, ...]
    variables: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)
    phases: Mapping[str, Any] = field(default_factory=dict)

    def to_system(self) -> StochasticSystem:
        gammas = {_key_time(k, f"gamma[{k!r}]"): _matrix(v, f"gamma[{k!r}]") for k, v in self.gamma.items()}
        variables = {
            name: RandomVariable(
                name, {_key_time(k, f"variables[{name!r}]"): _vector(v, f"variables[{name!r}][{k!r}]") for k, v in table.items()}
            )
            for name, table in self.variables.items()
        }
        return StochasticSystem(self.n, TimeGrid(self.times), gammas, _vector(self.p0, "p0"), variables)

    def phase_tables(self) -> dict[float, np.ndarray]:
        return {_key_time(k, f"phases[{k!r}]"): _matrix(v, f"phases[{k!r}]") for k, v in self.phases.items()}

    def to_json(self) -> str:
        out: dict[str, Any] = {
            "n": self.n,
            "times": list(self.times),
            "gamma": dict(self.gamma),
            "p0": list(self.p0),
        }
        if self.variables:
            out["variables"] = {k: dict(v) for k, v in self.variables.items()}
        if self.phases:
            out["phases"] = dict(self.phases)
        return json.dumps(out, indent=2) + "\n"

    @classmethod
    def from_system(cls, sys: StochasticSystem, phases: Mapping[float, np.ndarray] | None = None):
        return cls(
            n=int(sys.n),
            times=tuple(sys.times),
            gamma={time_key(t): np.asarray(sys.transitions[t]).tolist() for t in sys.times},
            p0=tuple(float(x) for x in sys.p0),
            variables={
                name: {time_key(t): np.asarray(v).tolist() for t, v in var.values.items()}
                for name, var in sys.variables.items()
            },
            phases={time_key(t): np.asarray(p).tolist() for t, p in (phases or {}).items()},
        )


def _key_time(key: str, where: str) -> float:
    try:
        return float(key)
    except ValueError:
        raise DocumentError(f"{where}: time key {key!r} is not a decimal number") from None


def _matrix(value, where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{where}: not a numeric matrix ({exc})") from None
    if arr.ndim != 2:
        raise DocumentError(f"{where}: expected a row-major matrix, got {arr.ndim} dimensions")
    return arr


def _vector(value, where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"{where}: not a numeric list ({exc})") from None
    if arr.ndim != 1:
        raise DocumentError(f"{where}: expected a flat list of numbers")
    return arr


def parse_document(text: str) -> SystemDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise DocumentError("top level must be a JSON object")
    missing = [k for k in ("n", "times", "gamma", "p0") if k not in raw]
    if missing:
        raise DocumentError(f"missing required field(s): {', '.join(missing)}")
    n = raw["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise DocumentError(f"n must be an integer, got {n!r}")
    times = raw["times"]
    if not isinstance(times, list) or not all(_is_number(t) for t in times):
        raise DocumentError("times must be a list of numbers")
    for name in ("gamma", "variables", "phases"):
        if not isinstance(raw.get(name, {}), dict):
            raise DocumentError(f"{name} must be an object keyed by time")
    if not all(isinstance(v, dict) for v in raw.get("variables", {}).values()):
        raise DocumentError("each variable must be an object keyed by time")
    doc = SystemDocument(
        n=n,
        times=tuple(float(t) for t in times),
        gamma=raw["gamma"],
        p0=tuple(raw["p0"]) if isinstance(raw["p0"], list) else raw["p0"],
        variables=raw.get("variables", {}),
        phases=raw.get("phases", {}),
    )
    doc.to_system()  # surface shape/type problems as parse errors
    doc.phase_tables()
    return doc


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def load_document(path: str | os.PathLike) -> SystemDocument:
    return parse_document(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# CSV


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def probability_table_csv(times, probs) -> str:
    n = len(probs[0]) if len(probs) else 0
    header = ["time"] + [f"p_{i + 1}" for i in range(n)]
    return _csv_text(header, ([fmt(t)] + [fmt(x) for x in p] for t, p in zip(times, probs)))


def real_matrix_csv(m: np.ndarray) -> str:
    m = np.asarray(m, dtype=float)
    header = [f"c{k + 1}" for k in range(m.shape[1])]
    return _csv_text(header, ([fmt(x) for x in row] for row in m))


def complex_matrix_csv(m: np.ndarray) -> str:
    m = np.asarray(m, dtype=complex)
    header = [f"c{k + 1}{s}" for k in range(m.shape[1]) for s in ("_re", "_im")]
    rows = ([fmt(v) for z in row for v in (z.real, z.imag)] for row in m)
    return _csv_text(header, rows)


def read_real_csv(text: str) -> tuple[list[str], np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]])


def read_complex_csv(text: str) -> np.ndarray:
    _, arr = read_real_csv(text)
    return arr[:, 0::2] + 1j * arr[:, 1::2]


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
