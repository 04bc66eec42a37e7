import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flowshop_markov.instance import (
    TABLE_I,
    FailureModel,
    FlowshopInstance,
    InstanceError,
    Schedule,
    ScheduleError,
    TimingMatrix,
    apply_schedule,
    dumps_instance,
    load_instance,
    parse_instance,
    save_instance,
    staircase_layout,
)

from helpers import OPTIMAL, timing_and_schedule, timings

TABLE_I_CSV = "\n".join(",".join(str(v) for v in row) for row in TABLE_I)


def test_parse_table_i():
    inst = parse_instance(TABLE_I_CSV)
    assert (inst.timing.machines, inst.timing.jobs) == (7, 10)
    assert inst.timing.at(1, 1) == 3
    assert inst.timing.at(7, 10) == 6
    assert inst.failure is None


def test_parse_single_value():
    inst = parse_instance("5")
    assert inst.timing.shape == (1, 1)
    assert inst.timing.at(1, 1) == 5


def test_parse_csv_header():
    inst = parse_instance("# machines=2 jobs=3 ps=0.8\n1,2,3\n4,5,6\n")
    assert inst.failure == FailureModel(0.8)
    assert inst.timing.rows() == [[1, 2, 3], [4, 5, 6]]


def test_parse_json():
    text = json.dumps({"machines": 2, "jobs": 2, "times": [[1, 2], [3, 4.5]], "p_success": 0.5})
    inst = parse_instance(text)
    assert inst.timing.at(2, 2) == 4.5
    assert inst.p_success == 0.5


@pytest.mark.parametrize(
    "text, match",
    [
        ("1,2,3\n4,5\n", "ragged rows"),
        ("1,x\n", "non-numeric"),
        ("1,-2\n", "negative"),
        ("", "M = 0"),
        ("# machines=3\n1,2\n", "declared machines"),
        ("# ps=1.5\n1,2\n", "p_success"),
        ("# ps=0\n1,2\n", "p_success"),
        ('{"times": [[1, 2], [3]]}', "ragged rows"),
        ('{"times": [[1, "a"]]}', "non-numeric"),
        ('{"times": []}', "M = 0"),
        ('{"times": [[]]}', "N = 0"),
        ('{"times": [[1]], "jobs": 2}', "declared jobs"),
        ('{"times": [[1]]', "malformed"),
        ('{"machines": 1}', "malformed"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(InstanceError, match=match):
        parse_instance(text)


def test_timing_rejects_nonfinite():
    with pytest.raises(InstanceError):
        TimingMatrix(np.array([[1.0, np.inf]]))


def test_zero_durations_allowed():
    assert TimingMatrix.from_rows([[0, 0]]).jobs == 2


def test_timing_is_immutable():
    t = TimingMatrix.from_rows([[1, 2]])
    with pytest.raises(ValueError):
        t.entries[0, 0] = 5


def test_failure_model():
    f = FailureModel(0.8)
    assert f.p_failure == 1 - 0.8
    assert FailureModel(1).p_failure == 0
    for bad in (0, -0.1, 1.01, float("nan")):
        with pytest.raises(InstanceError):
            FailureModel(bad)


def test_schedule_validation():
    with pytest.raises(ScheduleError):
        Schedule((1, 1, 2))
    with pytest.raises(ScheduleError):
        Schedule((0, 1))
    with pytest.raises(ScheduleError):
        Schedule.parse("")


def test_schedule_parse_forms():
    assert Schedule.parse("[3, 1 2]").order == (3, 1, 2)
    assert Schedule.parse("3,1,2").order == (3, 1, 2)


def test_apply_schedule_table_ii(table3):
    out = apply_schedule(table3.timing, Schedule(OPTIMAL))
    assert out.entries[:, 0].tolist() == [0.3, 0.1, 1.4]
    # Table II, last column is j1
    assert out.entries[:, -1].tolist() == [3, 0.8, 1]
    assert table3.timing.at(1, 10) == 0.3  # input untouched


def test_apply_schedule_swap_and_identity():
    t = TimingMatrix.from_rows([[1, 2], [3, 4]])
    assert apply_schedule(t, Schedule((2, 1))).rows() == [[2, 1], [4, 3]]
    assert apply_schedule(t, Schedule.identity(2)) == t


def test_apply_schedule_length_mismatch():
    with pytest.raises(ScheduleError):
        apply_schedule(TimingMatrix.from_rows([[1, 2, 3]]), Schedule((1, 2)))


@given(timing_and_schedule())
def test_apply_inverse_is_identity(ts):
    t, s = ts
    assert apply_schedule(apply_schedule(t, s), s.inverse()) == t


def test_staircase_examples():
    assert staircase_layout(TimingMatrix.from_rows([[1, 2], [3, 4]])).tolist() == [
        [1, 2, 0],
        [1, 3, 4],
    ]
    one = TimingMatrix.from_rows([[4, 5, 6]])
    assert staircase_layout(one).tolist() == [[4, 5, 6]]
    t = TimingMatrix(np.arange(1, 13, dtype=float).reshape(3, 4))
    lay = staircase_layout(t)
    assert lay.shape == (3, 6)
    assert lay[0].tolist() == [1, 2, 3, 4, 0, 0]
    assert lay[2].tolist() == [t.at(1, 1), t.at(2, 1), t.at(3, 1), t.at(3, 2), t.at(3, 3), t.at(3, 4)]


@given(timings())
def test_staircase_keeps_own_durations(t):
    lay = staircase_layout(t)
    m, n = t.shape
    assert lay.shape == (m, m + n - 1)
    for i in range(m):
        assert lay[i, i : i + n].tolist() == t.entries[i].tolist()
        assert np.all(lay[i, i + n :] == 0)


@given(timings(), st.one_of(st.none(), st.floats(0.01, 1)), st.sampled_from(["json", "csv"]))
def test_roundtrip(t, ps, fmt):
    inst = FlowshopInstance(t, None if ps is None else FailureModel(ps))
    back = parse_instance(dumps_instance(inst, fmt))
    assert back == inst
    assert back.timing.entries.tobytes() == t.entries.tobytes()


def test_file_io(tmp_path, table3):
    p = tmp_path / "inst.json"
    save_instance(table3, p)
    assert load_instance(p) == table3
    assert json.loads(p.read_text())["machines"] == 3
