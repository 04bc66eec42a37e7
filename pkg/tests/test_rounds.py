import numpy as np
import pytest
from hypothesis import given

from flowshop_markov.evaluator import ct_no_fail, machine_timelines
from flowshop_markov.instance import FailureModel, FlowshopInstance, Schedule, TimingMatrix
from flowshop_markov.rounds import RoundsError, machine_rounds

from helpers import timing_and_schedule


def test_table_rounds(table3, optimal):
    rep = machine_rounds(table3, optimal)
    r1 = 40.3 / 29.3
    r2 = 1 + (40.3 - 32.1 - r1 * 0.3) / 32.1
    assert rep.rounds == pytest.approx((r1, r2, 1.0), rel=1e-12)
    assert rep.rounds == pytest.approx((1.3754266, 1.2425973, 1.0), abs=1e-6)
    assert rep.monotone
    assert rep.completion_time == pytest.approx(40.3)
    assert [m.below_one for m in rep.machines] == [False, False, False]


def test_constant_grid_flags_below_one():
    rep = machine_rounds(FlowshopInstance(TimingMatrix(np.ones((3, 4)))), Schedule.identity(4))
    assert rep.rounds == pytest.approx((1.5, 0.9, 1.0))
    assert rep.machines[1].below_one
    assert rep.machines[1].idle_budget == pytest.approx(-0.5)
    assert not rep.monotone


def test_single_machine():
    rep = machine_rounds(FlowshopInstance(TimingMatrix.from_rows([[1, 2]])), Schedule.identity(2))
    assert rep.rounds == (1.0,)


def test_rejects_failures(table3, optimal):
    with pytest.raises(RoundsError, match="out of scope"):
        machine_rounds(table3.with_failure(FailureModel(0.8)), optimal)
    # p_s = 1 is the failure-free model
    assert machine_rounds(table3.with_failure(FailureModel(1.0)), optimal).rounds[-1] == 1.0


def test_zero_machine():
    with pytest.raises(RoundsError, match="zero total time"):
        machine_rounds(FlowshopInstance(TimingMatrix.from_rows([[0, 0], [1, 1]])), Schedule.identity(2))


def test_to_dict(table3, optimal):
    d = machine_rounds(table3, optimal).to_dict()
    assert d["schedule"] == list(optimal.order)
    assert len(d["machines"]) == 3 and d["machines"][2]["rounds"] == 1.0


@given(timing_and_schedule())
def test_first_and_last(ts):
    t, s = ts
    if np.any(t.entries.sum(axis=1) == 0) or t.entries[0].sum() < 1e-6:
        return
    rep = machine_rounds(FlowshopInstance(t), s)
    lines = machine_timelines(t, s)
    ct = ct_no_fail(t, s)
    assert rep.machines[-1].rounds == 1.0
    if t.machines > 1:
        assert rep.machines[0].rounds == pytest.approx(ct / lines[0].total_time)
        assert rep.machines[0].rounds >= 1.0 - 1e-12
    for m, line in zip(rep.machines, lines):
        assert m.total_time == line.total_time
