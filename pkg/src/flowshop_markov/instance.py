"""Flowshop instances, schedules and the instance file formats.

Machines and jobs are 1-based everywhere a user can see them (file formats,
``Schedule.order``, error messages). Internally the timing grid is a numpy
array indexed from 0.

Two on-disk formats are understood:

* CSV: one line per machine, comma-separated durations, optionally preceded
  by a header line ``# machines=M jobs=N ps=<p>`` (every key optional).
* JSON: ``{"machines": M, "jobs": N, "times": [[...], ...], "p_success": p}``
  where ``p_success`` is optional.

>>> inst = parse_instance("1,2\\n3,4\\n")
>>> inst.timing.machines, inst.timing.jobs
(2, 2)
>>> apply_schedule(inst.timing, Schedule((2, 1))).entries.tolist()
[[2.0, 1.0], [4.0, 3.0]]
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class FlowshopError(ValueError):
    """Base class for every validation error raised by this package."""


class InstanceError(FlowshopError):
    pass


class ScheduleError(FlowshopError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimingMatrix:
    """M x N job durations; row i is machine i+1, column j is job j+1."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        try:
            a = np.asarray(self.entries, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"non-numeric entry: {exc}") from None
        if a.ndim != 2:
            raise InstanceError("timing matrix must be two-dimensional")
        if a.shape[0] == 0 or a.shape[1] == 0:
            raise InstanceError("need at least one machine and one job (M = 0 or N = 0)")
        if not np.all(np.isfinite(a)):
            raise InstanceError("durations must be finite")
        if np.any(a < 0):
            i, j = np.argwhere(a < 0)[0]
            raise InstanceError(f"negative duration at machine {i + 1}, job {j + 1}")
        object.__setattr__(self, "entries", _frozen(a))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "TimingMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            raise InstanceError("need at least one machine and one job (M = 0 or N = 0)")
        if len({len(r) for r in rows}) != 1:
            raise InstanceError(
                "ragged rows: row lengths " + ", ".join(str(len(r)) for r in rows)
            )
        return cls(np.array(rows, dtype=float))

    @property
    def machines(self) -> int:
        return self.entries.shape[0]

    @property
    def jobs(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __getitem__(self, key):
        return self.entries[key]

    def at(self, machine: int, job: int) -> float:
        """Duration T(machine, job) with 1-based indices."""
        return float(self.entries[machine - 1, job - 1])

    def rows(self) -> list[list[float]]:
        return self.entries.tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimingMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"TimingMatrix(M={self.machines}, N={self.jobs})"


@dataclass(frozen=True)
class Schedule:
    """A job order, stored as 1-based job indices."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        try:
            order = tuple(int(j) for j in self.order)
        except (TypeError, ValueError):
            raise ScheduleError(f"schedule entries must be integers: {self.order!r}") from None
        if sorted(order) != list(range(1, len(order) + 1)):
            raise ScheduleError(
                f"schedule {list(order)} is not a permutation of 1..{len(order)}"
            )
        object.__setattr__(self, "order", order)

    @classmethod
    def identity(cls, n: int) -> "Schedule":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "Schedule":
        """Build from 0-based job indices."""
        return cls(tuple(int(j) + 1 for j in indices))

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """Accepts ``"10,4,5"``, ``"10 4 5"`` or ``"[10, 4, 5]"``."""
        parts = [p for p in re.split(r"[\s,\[\]]+", text.strip()) if p]
        if not parts:
            raise ScheduleError("empty schedule")
        return cls(tuple(parts))

    @property
    def indices(self) -> np.ndarray:
        return np.array(self.order, dtype=np.intp) - 1

    def inverse(self) -> "Schedule":
        inv = [0] * len(self.order)
        for pos, job in enumerate(self.order, start=1):
            inv[job - 1] = pos
        return Schedule(tuple(inv))

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __str__(self) -> str:
        return "[" + " ".join(f"j{j}" for j in self.order) + "]"


@dataclass(frozen=True)
class FailureModel:
    """Every job fails independently with ``p_failure`` and is repeated until it succeeds."""

    p_success: float

    def __post_init__(self) -> None:
        p = float(self.p_success)
        if not (0.0 < p <= 1.0) or math.isnan(p):
            raise InstanceError(f"p_success must lie in (0, 1], got {self.p_success}")
        object.__setattr__(self, "p_success", p)

    @property
    def p_failure(self) -> float:
        return 1.0 - self.p_success


@dataclass(frozen=True)
class FlowshopInstance:
    timing: TimingMatrix
    failure: FailureModel | None = None

    @property
    def p_success(self) -> float:
        return 1.0 if self.failure is None else self.failure.p_success

    @property
    def descriptor(self) -> str:
        """The ``N/M/P/F`` label used in the literature."""
        return f"{self.timing.jobs}/{self.timing.machines}/P/F"

    def with_failure(self, failure: FailureModel | None) -> "FlowshopInstance":
        return FlowshopInstance(self.timing, failure)

    def restrict_machines(self, m: int) -> "FlowshopInstance":
        """Keep machines 1..m."""
        if not 1 <= m <= self.timing.machines:
            raise InstanceError(f"machine count {m} outside 1..{self.timing.machines}")
        return FlowshopInstance(TimingMatrix(self.timing.entries[:m]), self.failure)


def apply_schedule(timing: TimingMatrix, schedule: Schedule) -> TimingMatrix:
    """Reorder columns so that column k holds job ``schedule.order[k]``."""
    if len(schedule) != timing.jobs:
        raise ScheduleError(
            f"schedule has {len(schedule)} jobs but the instance has {timing.jobs}"
        )
    return TimingMatrix(timing.entries[:, schedule.indices])


def staircase_layout(timing: TimingMatrix) -> np.ndarray:
    """Shifted M x (M+N-1) layout of the timing grid.

    Row i starts with the first-job durations of machines 1..i-1, then lists
    machine i's own N durations, then zeros. Columns of the result line up
    with the stages of the completion-time model up to the leading prefix.
    """
    m, n = timing.shape
    out = np.zeros((m, m + n - 1))
    for i in range(m):
        out[i, :i] = timing.entries[:i, 0]
        out[i, i : i + n] = timing.entries[i]
    return out


# ---------------------------------------------------------------- parsing

_HEADER_RE = re.compile(r"(\w+)\s*=\s*([^\s,]+)")


def _number(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise InstanceError(f"non-numeric entry {token!r} {where}") from None


def _build(rows, machines=None, jobs=None, p_success=None) -> FlowshopInstance:
    timing = TimingMatrix.from_rows(rows)
    if machines is not None and int(machines) != timing.machines:
        raise InstanceError(f"declared machines={machines} but found {timing.machines} rows")
    if jobs is not None and int(jobs) != timing.jobs:
        raise InstanceError(f"declared jobs={jobs} but rows have {timing.jobs} entries")
    failure = None if p_success is None else FailureModel(float(p_success))
    return FlowshopInstance(timing, failure)


def _parse_json(text: str) -> FlowshopInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed instance: {exc}") from None
    if not isinstance(obj, dict) or "times" not in obj:
        raise InstanceError("malformed instance: expected an object with a 'times' field")
    times = obj["times"]
    if not isinstance(times, list) or not all(isinstance(r, list) for r in times):
        raise InstanceError("malformed instance: 'times' must be a list of lists")
    rows = []
    for i, row in enumerate(times, start=1):
        vals = []
        for j, v in enumerate(row, start=1):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InstanceError(f"non-numeric entry {v!r} at machine {i}, job {j}")
            vals.append(float(v))
        rows.append(vals)
    return _build(rows, obj.get("machines"), obj.get("jobs"), obj.get("p_success"))


def _parse_csv(text: str) -> FlowshopInstance:
    header: dict[str, str] = {}
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            header.update({k.lower(): v for k, v in _HEADER_RE.findall(stripped)})
            continue
        cells = next(csv.reader([stripped]))
        rows.append([_number(c.strip(), f"on line {lineno}") for c in cells])
    ps = header.get("ps", header.get("p_success"))
    return _build(rows, header.get("machines"), header.get("jobs"), ps)


def parse_instance(source: str) -> FlowshopInstance:
    """Parse an instance from CSV or JSON text (detected from the first character)."""
    if source.lstrip().startswith("{"):
        return _parse_json(source)
    return _parse_csv(source)


def load_instance(path: str | Path) -> FlowshopInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def instance_to_dict(instance: FlowshopInstance) -> dict:
    d = {
        "machines": instance.timing.machines,
        "jobs": instance.timing.jobs,
        "times": instance.timing.rows(),
    }
    if instance.failure is not None:
        d["p_success"] = instance.failure.p_success
    return d


def dumps_instance(instance: FlowshopInstance, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(instance_to_dict(instance), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        head = f"# machines={instance.timing.machines} jobs={instance.timing.jobs}"
        if instance.failure is not None:
            head += f" ps={instance.failure.p_success!r}"
        buf.write(head + "\n")
        for row in instance.timing.rows():
            buf.write(",".join(repr(v) for v in row) + "\n")
        return buf.getvalue()
    raise ValueError(f"unknown instance format {fmt!r}")


def save_instance(instance: FlowshopInstance, path: str | Path, fmt: str = "json") -> None:
    Path(path).write_text(dumps_instance(instance, fmt), encoding="utf-8")


# Durations of the 10-job, 7-machine benchmark used throughout the examples.
TABLE_I = (
    (3, 6, 2, 1, 2, 3, 4, 5, 3, 0.3),
    (0.8, 4.5, 1, 0.5, 2, 3, 4, 2, 6, 0.1),
    (1, 2, 3, 4, 7, 2, 4, 5, 8, 1.4),
    (2, 0.9, 1, 0.5, 7, 4, 3, 5, 7, 1.4),
    (0.1, 0.9, 5, 0.5, 7, 4, 2, 5, 8, 6),
    (2, 4, 1.1, 1.5, 7, 8, 3, 5, 7, 1.4),
    (0.1, 0.9, 5, 0.5, 6, 4, 9, 5, 2, 6),
)


def table_i(machines: int = 7) -> FlowshopInstance:
    """The first ``machines`` rows of the 10-job benchmark grid."""
    if not 1 <= machines <= len(TABLE_I):
        raise InstanceError(f"benchmark grid has 7 machines, asked for {machines}")
    return FlowshopInstance(TimingMatrix.from_rows(TABLE_I[:machines]))
