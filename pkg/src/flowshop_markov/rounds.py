"""How often each machine could be reused within one failure-free completion time.

Machine i finishes its own batch after T_Mi (processing plus waiting). The
slack left inside the completion time CT is its idle budget tau_i, and the
round count is R_i = 1 + tau_i / T_Mi. Every downstream machine also has to
wait for the first job of each extra round upstream, so

    tau_1 = CT - T_M1
    tau_i = CT - T_Mi - sum_{k<i} R_k * T(k, first scheduled job)

The last machine runs exactly once by definition (R_M = 1): applying the
recursion to it would subtract positive first-job terms from CT / T_MM = 1.
Intermediate machines can come out below one; those values are kept and
flagged rather than clamped.
"""

from __future__ import annotations

from dataclasses import dataclass

from .evaluator import machine_timelines
from .instance import FlowshopError, FlowshopInstance, Schedule, apply_schedule


class RoundsError(FlowshopError):
    pass


@dataclass(frozen=True)
class MachineRounds:
    machine: int
    total_time: float
    idle_budget: float
    rounds: float

    @property
    def below_one(self) -> bool:
        return self.rounds < 1.0

    def to_dict(self) -> dict:
        return {
            "machine": self.machine,
            "total_time": self.total_time,
            "idle_budget": self.idle_budget,
            "rounds": self.rounds,
            "below_one": self.below_one,
        }


@dataclass(frozen=True)
class RoundsReport:
    schedule: Schedule
    completion_time: float
    machines: tuple[MachineRounds, ...]

    @property
    def rounds(self) -> tuple[float, ...]:
        return tuple(m.rounds for m in self.machines)

    @property
    def monotone(self) -> bool:
        """Whether R_1 >= R_2 >= ... >= R_M holds on this instance (not guaranteed)."""
        r = self.rounds
        return all(a >= b for a, b in zip(r, r[1:]))

    def to_dict(self) -> dict:
        return {
            "schedule": list(self.schedule.order),
            "completion_time": self.completion_time,
            "monotone": self.monotone,
            "machines": [m.to_dict() for m in self.machines],
        }


def machine_rounds(instance: FlowshopInstance, schedule: Schedule) -> RoundsReport:
    if instance.failure is not None and instance.failure.p_success < 1.0:
        raise RoundsError("rounds with failures is out of scope")
    timing = instance.timing
    lines = machine_timelines(timing, schedule)
    first_jobs = apply_schedule(timing, schedule).entries[:, 0]
    ct = lines[-1].total_time
    out = []
    carried = 0.0  # sum_{k<i} R_k * T(k, first job)
    for i, line in enumerate(lines):
        total = line.total_time
        if total <= 0.0:
            raise RoundsError(f"machine {i + 1} has zero total time; rounds undefined")
        if i == len(lines) - 1:
            r, tau = 1.0, 0.0
        elif i == 0:
            tau, r = ct - total, ct / total
        else:
            tau = ct - total - carried
            r = 1.0 + tau / total
        carried += r * float(first_jobs[i])
        out.append(MachineRounds(i + 1, total, tau, r))
    return RoundsReport(schedule, ct, tuple(out))
