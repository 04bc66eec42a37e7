"""Side-by-side algorithm comparison and the parameter sweeps behind the figures."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import search
from .evaluator import ct_no_fail
from .instance import FlowshopError, FlowshopInstance, Schedule, TimingMatrix

ALGORITHMS = ("benchmark", "alg1", "alg2", "alg3", "alg4")


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    min_ct: float
    max_ct: float
    permutations: int
    wall_time: float
    schedule: Schedule
    criterion: float | None = None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "min_ct": self.min_ct,
            "max_ct": self.max_ct,
            "permutations": self.permutations,
            "wall_time": self.wall_time,
            "schedule": list(self.schedule.order),
            "criterion": self.criterion,
        }


@dataclass(frozen=True)
class BenchReport:
    descriptor: str
    rows: tuple[BenchRow, ...]
    skipped: tuple[str, ...] = ()

    def row(self, algorithm: str) -> BenchRow:
        for r in self.rows:
            if r.algorithm == algorithm:
                return r
        raise KeyError(algorithm)

    def to_dict(self) -> dict:
        return {
            "instance": self.descriptor,
            "rows": [r.to_dict() for r in self.rows],
            "skipped": list(self.skipped),
        }


def solve(
    instance: FlowshopInstance,
    algorithm: str,
    *,
    mode: str = "frobenius",
    include_all_jobs: bool = False,
    override: bool = False,
    workers: int = 1,
    tie_break: str = search.LEX_LARGEST,
) -> search.SearchResult:
    """Dispatch one of the named algorithms."""
    if algorithm == "benchmark":
        return search.brute_force(
            instance, override=override, workers=workers, tie_break=tie_break
        )
    if algorithm == "alg1":
        return search.algorithm1(
            instance, override=override, workers=workers, tie_break=tie_break
        )
    if algorithm == "alg2":
        return search.algorithm2(instance)
    if algorithm == "alg3":
        return search.algorithm3(
            instance, include_all_jobs=include_all_jobs, override=override,
            workers=workers, tie_break=tie_break,
        )
    if algorithm == "alg4":
        return search.algorithm4(
            instance, mode=mode, include_all_jobs=include_all_jobs, override=override,
            workers=workers, tie_break=tie_break,
        )
    raise FlowshopError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


def run_bench(
    instance: FlowshopInstance,
    algorithms: Sequence[str] = ALGORITHMS,
    *,
    include_all_jobs: bool = False,
    mode: str = "frobenius",
    override: bool = False,
    workers: int = 1,
) -> BenchReport:
    """Run each algorithm once and tabulate min/max completion times.

    Values are expected completion times under the instance's failure model.
    The exhaustive benchmark is skipped, not failed, when N is above the cap.
    ``include_all_jobs`` adds alg3/alg4 rows that scan every order with
    free endpoints next to the pinned-endpoint rows.
    """
    scale = 1.0 / instance.p_success
    n = instance.timing.jobs
    todo: list[tuple[str, str, bool]] = [(a, a, False) for a in algorithms]
    if include_all_jobs:
        todo += [(f"{a}-iaj", a, True) for a in algorithms if a in ("alg3", "alg4")]
    rows, skipped = [], []
    for label, alg, all_jobs in todo:
        if alg == "benchmark" and n > search.FULL_SCAN_CAP and not override:
            skipped.append(label)
            continue
        t0 = time.perf_counter()
        res = solve(
            instance, alg, mode=mode, include_all_jobs=all_jobs,
            override=override, workers=workers,
        )
        wall = time.perf_counter() - t0
        # criterion-driven scans report failure-free times; put them on the same footing
        k = 1.0 if res.objective in (search.COMPLETION_TIME, search.MIN_MAX_GREEDY) else scale
        rows.append(
            BenchRow(
                label, res.best_value * k, res.worst_value * k,
                res.permutations_examined, wall, res.best_schedule, res.criterion,
            )
        )
    return BenchReport(instance.descriptor, tuple(rows), tuple(skipped))


# ---------------------------------------------------------------- sweeps


def equal_time_instance(machines: int, jobs: int, duration: float = 1.0) -> FlowshopInstance:
    return FlowshopInstance(TimingMatrix(np.full((machines, jobs), float(duration))))


def staggered_instance(machines: int, jobs: int) -> FlowshopInstance:
    """Job j takes j time units on every machine."""
    row = np.arange(1, jobs + 1, dtype=float)
    return FlowshopInstance(TimingMatrix(np.tile(row, (machines, 1))))


def _extremes(instance: FlowshopInstance, override: bool, workers: int) -> tuple[float, float]:
    r = search.brute_force(instance, override=override, workers=workers)
    return r.best_value, r.worst_value


def sweep_machines(
    values: Iterable[int], jobs: int, duration: float = 1.0, *, override=False, workers=1
) -> list[tuple[float, float, float]]:
    """(M, min CT, max CT) over equal-duration instances."""
    return [
        (m, *_extremes(equal_time_instance(int(m), jobs, duration), override, workers))
        for m in values
    ]


def sweep_jobs(
    values: Iterable[int], machines: int, *, override=False, workers=1
) -> list[tuple[float, float, float]]:
    """(N, min CT, max CT) as jobs of duration 1, 2, ..., N are added."""
    return [
        (n, *_extremes(staggered_instance(machines, int(n)), override, workers))
        for n in values
    ]


def sweep_success(
    timing: TimingMatrix, schedule: Schedule, values: Iterable[float]
) -> list[tuple[float, float]]:
    """(p_s, expected CT) at a fixed schedule."""
    base = ct_no_fail(timing, schedule)
    out = []
    for p in values:
        if not 0.0 < p <= 1.0:
            raise FlowshopError(f"p_success must lie in (0, 1], got {p}")
        out.append((p, base / p))
    return out


def sweep_failure(
    timing: TimingMatrix, schedule: Schedule, values: Iterable[float]
) -> list[tuple[float, float]]:
    """(p_f, expected CT) at a fixed schedule."""
    base = ct_no_fail(timing, schedule)
    out = []
    for q in values:
        if not 0.0 <= q < 1.0:
            raise FlowshopError(f"p_failure must lie in [0, 1), got {q}")
        out.append((q, base / (1.0 - q)))
    return out
