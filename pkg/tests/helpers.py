"""Shared data and hypothesis strategies for the test-suite."""

import numpy as np
from hypothesis import strategies as st

from flowshop_markov.instance import FlowshopInstance, Schedule, TimingMatrix

OPTIMAL = (10, 4, 5, 9, 7, 2, 8, 3, 6, 1)
WORST = (9, 10, 6, 7, 5, 3, 1, 2, 4, 8)


def random_instances(count, max_m, max_n, seed, low=0.1, high=10.0):
    """Deterministic batch of random instances (durations uniform in [low, high])."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        m = int(rng.integers(1, max_m + 1))
        n = int(rng.integers(1, max_n + 1))
        t = TimingMatrix(rng.uniform(low, high, size=(m, n)))
        out.append((FlowshopInstance(t), Schedule.from_indices(rng.permutation(n))))
    return out


@st.composite
def timings(draw, max_m=4, max_n=5, min_m=1, min_n=1):
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(min_n, max_n))
    vals = st.floats(0, 20, allow_nan=False, allow_infinity=False)
    rows = draw(st.lists(st.lists(vals, min_size=n, max_size=n), min_size=m, max_size=m))
    return TimingMatrix.from_rows(rows)


@st.composite
def timing_and_schedule(draw, **kw):
    t = draw(timings(**kw))
    perm = draw(st.permutations(range(1, t.jobs + 1)))
    return t, Schedule(tuple(perm))


# plain-python oracles, deliberately loop-based


def loop_stages(rows, order):
    """Plain-loop oracle: stage l holds operations (i, pos) with i + pos - 1 == l."""
    m, n = len(rows), len(order)
    out = []
    for stage in range(1, m + n):
        best = 0.0
        for i in range(1, m + 1):
            pos = stage - i + 1
            if 1 <= pos <= n:
                best = max(best, rows[i - 1][order[pos - 1] - 1])
        out.append(best)
    return out


def loop_timeline(rows, order, machine):
    """Stage lengths seen by ``machine`` counting only machines 1..machine."""
    n = len(order)
    lens, own = [], []
    for stage in range(1, n + machine):
        best, mine = 0.0, 0.0
        for i in range(1, machine + 1):
            pos = stage - i + 1
            if 1 <= pos <= n:
                v = rows[i - 1][order[pos - 1] - 1]
                best = max(best, v)
                if i == machine:
                    mine = v
        lens.append(best)
        own.append(mine)
    return lens, own


def backward_weighted(stages, p):
    """CT^(k) = T_k / p_f + (p_s / p_f) CT^(k+1), unrolled from the last stage."""
    q = 1 - p
    acc = 0.0
    for t in reversed(stages):
        acc = t / q + (p / q) * acc
    return acc
