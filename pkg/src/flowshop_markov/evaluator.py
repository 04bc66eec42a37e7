"""Completion and waiting times of a fixed schedule under the stage-sum model.

A schedule of N jobs on M machines passes through M+N-1 stages. At stage l
(1-based) machine i works on the job at scheduled position l-i+1, if such a
position exists, so the active set is an anti-diagonal of the reordered
timing grid. A stage lasts as long as its slowest active operation, and the
completion time is the sum of the stage durations. This is *not* the
classical makespan recursion; the two generally disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instance import (
    FailureModel,
    FlowshopError,
    Schedule,
    TimingMatrix,
    apply_schedule,
    staircase_layout,
)


class WeightsUndefinedError(FlowshopError):
    pass


class PreconditionError(FlowshopError):
    pass


def stage_grid(entries: np.ndarray) -> np.ndarray:
    """Zero-padded M x (M+N-1) grid where column l holds the stage-l operations.

    Row i is machine i's durations shifted right by i. Zero padding is
    neutral for the stage maxima because durations are nonnegative.
    Works on a stack of scheduled grids too: ``entries`` of shape
    (M, ..., N) gives (M, ..., M+N-1).
    """
    m, n = entries.shape[0], entries.shape[-1]
    out = np.zeros(entries.shape[:-1] + (m + n - 1,))
    for i in range(m):
        out[i, ..., i : i + n] = entries[i]
    return out


@dataclass(frozen=True)
class StageTimes:
    values: tuple[float, ...]
    machines: int
    jobs: int

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def active(self, stage: int) -> tuple[tuple[int, int], ...]:
        """(machine, position) pairs busy at 1-based ``stage``."""
        return tuple(
            (i, stage - i + 1)
            for i in range(1, self.machines + 1)
            if 1 <= stage - i + 1 <= self.jobs
        )

    @property
    def membership(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        return tuple(self.active(k) for k in range(1, len(self.values) + 1))

    def total(self) -> float:
        return math.fsum(self.values)


@dataclass(frozen=True)
class WeightSeries:
    """Stage weights of the p_f = 1/2 expansion, listed from the last stage down to the first."""

    coefficients: tuple[float, ...]
    p_success: float

    @property
    def by_stage(self) -> tuple[float, ...]:
        return self.coefficients[::-1]


@dataclass(frozen=True)
class MachineTimeline:
    machine: int
    total_time: float
    processing: tuple[float, ...]
    waits: tuple[float, ...]

    @property
    def total_wait(self) -> float:
        return math.fsum(self.waits)

    @property
    def per_stage(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.processing, self.waits))


@dataclass(frozen=True)
class ScheduleEvaluation:
    schedule: Schedule
    stage_times: StageTimes
    ct_no_fail: float
    timelines: tuple[MachineTimeline, ...]
    ct_with_fail: float | None = None
    p_success: float | None = None
    weights: WeightSeries | None = None
    weighted_ct: float | None = None

    def to_dict(self) -> dict:
        d = {
            "schedule": list(self.schedule.order),
            "stages": list(self.stage_times.values),
            "ct_no_fail": self.ct_no_fail,
            "ct_with_fail": self.ct_with_fail,
            "machine_totals": [t.total_time for t in self.timelines],
            "machine_waits": [t.total_wait for t in self.timelines],
        }
        if self.p_success is not None:
            d["p_success"] = self.p_success
        if self.weights is not None:
            d["weights"] = list(self.weights.coefficients)
            d["weighted_ct"] = self.weighted_ct
        return d


def stage_times(timing: TimingMatrix, schedule: Schedule) -> StageTimes:
    scheduled = apply_schedule(timing, schedule).entries
    values = stage_grid(scheduled).max(axis=0)
    return StageTimes(tuple(float(v) for v in values), timing.machines, timing.jobs)


def ct_no_fail(timing: TimingMatrix, schedule: Schedule) -> float:
    return stage_times(timing, schedule).total()


def ct_with_fail(timing: TimingMatrix, schedule: Schedule, failure: FailureModel) -> float:
    """Expected completion time when every stage repeats until success."""
    return ct_no_fail(timing, schedule) / failure.p_success


def weight_series(machines: int, jobs: int, failure: FailureModel) -> WeightSeries:
    """Weights p^(l-1) / (1-p)^l of stage l, returned last stage first.

    >>> weight_series(3, 4, FailureModel(0.5)).coefficients
    (2.0, 2.0, 2.0, 2.0, 2.0, 2.0)
    """
    p = failure.p_success
    if p >= 1.0:
        raise WeightsUndefinedError("weights undefined at p_s=1")
    q = 1.0 - p
    stages = machines + jobs - 1
    by_stage = [p ** (k - 1) / q**k for k in range(1, stages + 1)]
    return WeightSeries(tuple(by_stage[::-1]), p)


def weighted_ct(timing: TimingMatrix, schedule: Schedule, failure: FailureModel) -> float:
    w = weight_series(timing.machines, timing.jobs, failure).by_stage
    st = stage_times(timing, schedule).values
    return math.fsum(a * b for a, b in zip(w, st))


def machine_timelines(timing: TimingMatrix, schedule: Schedule) -> tuple[MachineTimeline, ...]:
    """Per-machine processing plus waiting time.

    Machine i is followed over stages 1..N+i-1; only machines 1..i count
    toward a stage's length, since later machines cannot hold machine i up.
    Whatever part of the stage machine i is not processing is waiting.
    """
    m, n = timing.shape
    grid = stage_grid(apply_schedule(timing, schedule).entries)
    running = np.maximum.accumulate(grid, axis=0)
    out = []
    for i in range(m):
        span = n + i
        stage_len = running[i, :span]
        own = grid[i, :span]
        waits = stage_len - own
        out.append(
            MachineTimeline(
                machine=i + 1,
                total_time=math.fsum(stage_len),
                processing=tuple(float(v) for v in own),
                waits=tuple(float(v) for v in waits),
            )
        )
    return tuple(out)


def waiting_diffs(timelines: Sequence[MachineTimeline]) -> list[float]:
    """Wait of machine i+1 minus wait of machine i, for i = 1..M-1."""
    w = [t.total_wait for t in timelines]
    return [b - a for a, b in zip(w, w[1:])]


def split_condition_holds(timing: TimingMatrix, schedule: Schedule) -> bool:
    """True when every column of the shifted layout is nondecreasing downwards.

    Then the slowest operation of each stage sits on the lowest active
    machine, which is what lets the completion time split into first-job
    terms and last-machine terms.
    """
    lay = staircase_layout(apply_schedule(timing, schedule))
    return bool(np.all(np.diff(lay, axis=0) >= 0))


def ct_split_special(timing: TimingMatrix, schedule: Schedule) -> float:
    """Completion time written as first-job terms plus the last N-1 stage maxima.

    Only valid when :func:`split_condition_holds`; refuses otherwise.
    """
    if not split_condition_holds(timing, schedule):
        raise PreconditionError("monotone-columns condition not met")
    t = apply_schedule(timing, schedule).entries
    m, n = t.shape
    middle = stage_grid(t)[:, m - 1 : m + n - 2].max(axis=0)
    return math.fsum([t[m - 1, n - 1], *t[: m - 1, 0], *middle])


def evaluate(
    timing: TimingMatrix,
    schedule: Schedule,
    failure: FailureModel | None = None,
) -> ScheduleEvaluation:
    st = stage_times(timing, schedule)
    ct = st.total()
    ev = dict(
        schedule=schedule,
        stage_times=st,
        ct_no_fail=ct,
        timelines=machine_timelines(timing, schedule),
    )
    if failure is not None:
        ev["ct_with_fail"] = ct / failure.p_success
        ev["p_success"] = failure.p_success
        if failure.p_success < 1.0:
            ev["weights"] = weight_series(timing.machines, timing.jobs, failure)
            ev["weighted_ct"] = weighted_ct(timing, schedule, failure)
    return ScheduleEvaluation(**ev)
