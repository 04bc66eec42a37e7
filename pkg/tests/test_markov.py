import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flowshop_markov.evaluator import ct_no_fail, ct_with_fail, stage_times
from flowshop_markov.instance import FailureModel, FlowshopError, Schedule, TimingMatrix
from flowshop_markov.markov import (
    analytic_ct,
    build_chain,
    build_machine_chain,
    check_chain,
    expected_stage_visits,
    fundamental_matrix,
    sample_attempts,
    simulate_ct,
)

from helpers import random_instances, timing_and_schedule


def series_fundamental(chain, terms=4000):
    """Truncated Neumann series sum_k Q^k."""
    q = chain[:-1, :-1]
    acc = np.eye(q.shape[0])
    power = np.eye(q.shape[0])
    for _ in range(terms):
        power = power @ q
        acc += power
    return acc


@pytest.mark.parametrize("m, n", [(1, 1), (3, 4), (7, 10), (2, 1)])
@pytest.mark.parametrize("p", [0.3, 0.8, 1.0])
def test_chain_shape_and_rows(m, n, p):
    chain = build_chain(m, n, FailureModel(p))
    assert chain.shape == (m + n, m + n)
    assert np.abs(chain.sum(axis=1) - 1).max() <= 1e-12
    assert chain[-1, -1] == 1.0
    check_chain(chain)


def test_chain_entries():
    chain = build_chain(2, 2, FailureModel(0.8))
    assert chain[0, 0] == pytest.approx(0.2)
    assert chain[0, 1] == 0.8
    assert chain[2, 3] == 0.8
    assert chain[0, 2] == 0.0


def test_machine_chain():
    chain = build_machine_chain(4, FailureModel(0.5))
    assert chain.shape == (5, 5)
    with pytest.raises(FlowshopError):
        build_machine_chain(0, FailureModel(0.5))


@pytest.mark.parametrize("p", [0.3, 0.5, 0.9])
def test_fundamental_vs_series(p):
    chain = build_chain(3, 4, FailureModel(p))
    assert fundamental_matrix(chain) == pytest.approx(series_fundamental(chain), rel=1e-10)


def test_visits_are_reciprocal():
    v = expected_stage_visits(build_chain(3, 10, FailureModel(0.8)))
    assert v == pytest.approx(np.full(12, 1.25), rel=1e-12)


@pytest.mark.parametrize(
    "bad",
    [
        np.array([[0.5, 0.4], [0.0, 1.0]]),
        np.array([[1.2, -0.2], [0.0, 1.0]]),
        np.array([[0.5, 0.5], [0.5, 0.5]]),
        np.ones((2, 3)) / 3,
    ],
)
def test_check_chain_rejects(bad):
    with pytest.raises(FlowshopError):
        check_chain(bad)


def test_non_absorbing_singular():
    # a transient block that never leaks: identity chain with an unreachable end
    chain = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(RuntimeError):
        fundamental_matrix(chain)


def test_analytic_table(table3, optimal):
    assert analytic_ct(table3.timing, optimal, FailureModel(0.8)) == pytest.approx(
        40.3 / 0.8, rel=1e-12
    )


@given(timing_and_schedule(), st.sampled_from([0.3, 0.5, 0.8, 1.0]))
def test_analytic_equals_closed_form(ts, p):
    t, s = ts
    f = FailureModel(p)
    assert analytic_ct(t, s, f) == pytest.approx(ct_with_fail(t, s, f), rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------- sampling


def test_sample_attempts_distribution():
    rng = np.random.default_rng(0)
    g = sample_attempts(rng, 0.25, 200_000)
    assert g.min() >= 1
    assert g.mean() == pytest.approx(4.0, rel=0.02)
    assert g.var() == pytest.approx(0.75 / 0.0625, rel=0.05)
    assert (g == 1).mean() == pytest.approx(0.25, abs=0.01)


def test_sample_attempts_sure():
    assert np.all(sample_attempts(np.random.default_rng(0), 1.0, 10) == 1)


def test_simulate_within_four_se(table3, optimal):
    f = FailureModel(0.8)
    stats = simulate_ct(table3.timing, optimal, f, 100_000, seed=7)
    exact = analytic_ct(table3.timing, optimal, f)
    assert abs(stats.mean_ct - exact) <= 4 * stats.standard_error
    stages = np.array(stage_times(table3.timing, optimal).values)
    var = float((stages**2).sum() * 0.2 / 0.64)
    assert stats.variance == pytest.approx(var, rel=0.05)


def test_simulate_deterministic():
    t = TimingMatrix.from_rows([[1, 2, 3], [2, 2, 1]])
    s = Schedule.identity(3)
    f = FailureModel(0.6)
    a = simulate_ct(t, s, f, 120_000, seed=3)
    b = simulate_ct(t, s, f, 120_000, seed=3)
    c = simulate_ct(t, s, f, 120_000, seed=3, workers=3)
    assert a == b == c
    assert simulate_ct(t, s, f, 120_000, seed=4) != a


def test_simulate_certain_success():
    t = TimingMatrix.from_rows([[1, 2], [3, 4]])
    stats = simulate_ct(t, Schedule.identity(2), FailureModel(1.0), 10, seed=0)
    assert stats.mean_ct == ct_no_fail(t, Schedule.identity(2))
    assert stats.standard_error == 0.0


def test_simulate_bad_trials():
    with pytest.raises(FlowshopError):
        simulate_ct(TimingMatrix.from_rows([[1]]), Schedule.identity(1), FailureModel(0.5), 0, 0)


def test_simulate_single_trial():
    stats = simulate_ct(TimingMatrix.from_rows([[2]]), Schedule.identity(1), FailureModel(0.5), 1, 0)
    assert stats.trials == 1 and stats.variance == 0.0
    assert stats.mean_ct % 2 == 0


def test_simulate_random_cases():
    for k, (inst, s) in enumerate(random_instances(8, 4, 6, seed=21)):
        f = FailureModel((0.3, 0.5, 0.8)[k % 3])
        stats = simulate_ct(inst.timing, s, f, 20_000, seed=k)
        assert abs(stats.mean_ct - analytic_ct(inst.timing, s, f)) <= 4 * stats.standard_error
        assert stats.to_dict()["mean"] == stats.mean_ct
