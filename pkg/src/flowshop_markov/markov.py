"""Absorbing chain behind the failure model, plus a Monte Carlo check of it.

The global chain has one transient state per stage and a final absorbing
state. From a transient state the process stays put with probability
``p_failure`` (the stage is redone) and moves on with ``p_success``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .evaluator import stage_times
from .instance import FailureModel, FlowshopError, Schedule, TimingMatrix

ROW_SUM_TOL = 1e-12

# Trials are drawn in fixed-size chunks, each from its own substream keyed by
# (seed, chunk index); the result is then independent of how many workers ran.
SIM_CHUNK = 50_000


def _birth_chain(transient: int, p_success: float) -> np.ndarray:
    size = transient + 1
    p = np.zeros((size, size))
    for k in range(transient):
        p[k, k] = 1.0 - p_success
        p[k, k + 1] = p_success
    p[-1, -1] = 1.0
    return p


def check_chain(p: np.ndarray) -> None:
    """Raise unless ``p`` is row-stochastic with an absorbing last state."""
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise FlowshopError("transition matrix must be square")
    if np.any(p < 0):
        raise FlowshopError("negative transition probability")
    if np.max(np.abs(p.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
        raise FlowshopError("rows of the transition matrix must sum to 1")
    last = np.zeros(p.shape[0])
    last[-1] = 1.0
    if not np.array_equal(p[-1], last):
        raise FlowshopError("last state must be absorbing")


def build_chain(machines: int, jobs: int, failure: FailureModel) -> np.ndarray:
    """(M+N) x (M+N) transition matrix: M+N-1 stage states, then the end state.

    >>> build_chain(1, 1, FailureModel(0.75)).tolist()
    [[0.25, 0.75], [0.0, 1.0]]
    """
    if machines < 1 or jobs < 1:
        raise FlowshopError("need at least one machine and one job")
    p = _birth_chain(machines + jobs - 1, failure.p_success)
    check_chain(p)
    return p


def build_machine_chain(jobs: int, failure: FailureModel) -> np.ndarray:
    """(N+1) x (N+1) chain of a single machine working through its N jobs.

    Kept for inspection only; nothing downstream consumes it.
    """
    if jobs < 1:
        raise FlowshopError("need at least one job")
    p = _birth_chain(jobs, failure.p_success)
    check_chain(p)
    return p


def fundamental_matrix(chain: np.ndarray) -> np.ndarray:
    """(I - Q)^-1 over the transient block Q."""
    check_chain(chain)
    q = chain[:-1, :-1]
    eye = np.eye(q.shape[0])
    try:
        return np.linalg.solve(eye - q, eye)
    except np.linalg.LinAlgError:
        raise RuntimeError("transient block is singular; chain never absorbs") from None


def expected_stage_visits(chain: np.ndarray) -> np.ndarray:
    """Expected number of steps spent in each transient state when starting in state 1."""
    return fundamental_matrix(chain)[0]


def analytic_ct(timing: TimingMatrix, schedule: Schedule, failure: FailureModel) -> float:
    st = np.array(stage_times(timing, schedule).values)
    visits = expected_stage_visits(build_chain(timing.machines, timing.jobs, failure))
    return math.fsum(st * visits)


@dataclass(frozen=True)
class SimStats:
    trials: int
    mean_ct: float
    variance: float
    standard_error: float
    seed: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean"] = d.pop("mean_ct")
        return d


def sample_attempts(rng: np.random.Generator, p_success: float, size) -> np.ndarray:
    """Geometric attempt counts (support 1, 2, ...) by inversion: ceil(ln u / ln(1-p))."""
    if p_success >= 1.0:
        return np.ones(size)
    u = 1.0 - rng.random(size)  # (0, 1]
    g = np.ceil(np.log(u) / math.log1p(-p_success))
    # u == 1 maps to 0 attempts; the minimum is one attempt
    return np.maximum(g, 1.0)


def _chunk_moments(stages: np.ndarray, p_success: float, seed: int, chunk: int, n: int):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, chunk])))
    g = sample_attempts(rng, p_success, (n, stages.size))
    ct = g @ stages
    mean = float(ct.mean())
    m2 = float(((ct - mean) ** 2).sum())
    return n, mean, m2


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, sum of squared deviations)
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def simulate_ct(
    timing: TimingMatrix,
    schedule: Schedule,
    failure: FailureModel,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimStats:
    """Monte Carlo estimate of the expected completion time under failures.

    Each trial redraws, for every stage, how many attempts the stage needs
    and charges the full stage duration per attempt.
    """
    if trials < 1:
        raise FlowshopError("trials must be at least 1")
    st = stage_times(timing, schedule)
    if failure.p_success >= 1.0:
        return SimStats(trials, st.total(), 0.0, 0.0, seed)
    stages = np.array(st.values)
    sizes = [SIM_CHUNK] * (trials // SIM_CHUNK)
    if trials % SIM_CHUNK:
        sizes.append(trials % SIM_CHUNK)
    jobs = [(stages, failure.p_success, seed, k, n) for k, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_moments, *zip(*jobs)))
    else:
        parts = [_chunk_moments(*j) for j in jobs]
    acc = parts[0]
    for part in parts[1:]:
        acc = _merge(acc, part)
    n, mean, m2 = acc
    variance = m2 / (n - 1) if n > 1 else 0.0
    return SimStats(
        trials=n,
        mean_ct=mean,
        variance=variance,
        standard_error=math.sqrt(variance / n),
        seed=seed,
    )
