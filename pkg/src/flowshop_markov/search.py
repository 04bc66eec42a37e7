"""Job-ordering search: the exhaustive benchmark and the four ordering heuristics.

Every exhaustive scan walks permutations in lexicographic order, block by
block, and scores whole blocks at once with numpy. Two objective values
within ``TIE_TOL`` of each other count as tied, and ties go to the
lexicographically largest schedule by default (``LEX_SMALLEST`` flips that).
The default is what reproduces the published optimal and worst orders of
the 10-job benchmark, which both have several equal-valued alternatives.
Blocks can be farmed out to worker processes; results are merged in block
order with the same tie rule, so a parallel scan returns exactly what a
serial one does.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .evaluator import ct_no_fail, stage_grid
from .instance import FlowshopError, FlowshopInstance, Schedule, TimingMatrix

COMPLETION_TIME = "completion-time"
WAIT_DIFFERENCE = "wait-difference"
FIRST_LAST_LITERAL = "first-last-literal"
FIRST_LAST_FROBENIUS = "first-last-frobenius"
MIN_MAX_GREEDY = "min-max-greedy"

SCAN_OBJECTIVES = (COMPLETION_TIME, WAIT_DIFFERENCE, FIRST_LAST_LITERAL, FIRST_LAST_FROBENIUS)

FULL_SCAN_CAP = 10  # N! scans
INTERIOR_SCAN_CAP = 12  # (N-2)! scans
TIE_TOL = 1e-9
LEX_LARGEST = "lex-largest"
LEX_SMALLEST = "lex-smallest"

# Tails longer than this are split into prefix blocks; 8! rows per block.
_TAIL = 8


class CapExceededError(FlowshopError):
    pass


class EndpointError(FlowshopError):
    pass


@dataclass(frozen=True)
class SearchResult:
    best_schedule: Schedule
    best_value: float
    worst_schedule: Schedule
    worst_value: float
    objective: str
    permutations_examined: int
    criterion: float | None = None
    algorithm: str = ""
    fixed_endpoints: bool = False

    def to_dict(self) -> dict:
        d = {
            "algorithm": self.algorithm,
            "objective": self.objective,
            "best_schedule": list(self.best_schedule.order),
            "best_value": self.best_value,
            "worst_schedule": list(self.worst_schedule.order),
            "worst_value": self.worst_value,
            "permutations_examined": self.permutations_examined,
            "fixed_endpoints": self.fixed_endpoints,
        }
        if self.criterion is not None:
            d["criterion"] = self.criterion
        return d


@dataclass(frozen=True)
class DiagonalCumulative:
    machine: int
    shift: int
    diagonal: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)


# ------------------------------------------------------------ endpoints


def select_first_job(timing: TimingMatrix) -> int:
    """Job (1-based) with the shortest time on machine 1; lowest index on ties."""
    return int(np.argmin(timing.entries[0])) + 1


def select_last_job(timing: TimingMatrix) -> int:
    """Job with the shortest time on the last machine, skipping the first job's pick."""
    if timing.jobs < 2:
        raise EndpointError("cannot fix both endpoints with a single job")
    last_row = timing.entries[-1].copy()
    last_row[select_first_job(timing) - 1] = np.inf
    return int(np.argmin(last_row)) + 1


# ------------------------------------------------------- diagonal geometry


def cumulative_diagonal(
    timing: TimingMatrix, schedule: Schedule, machine: int, shift: int = 0
) -> DiagonalCumulative:
    """Running totals of one machine's scheduled durations, optionally delayed by one slot."""
    if not 1 <= machine <= timing.machines:
        raise FlowshopError(f"machine {machine} outside 1..{timing.machines}")
    if shift not in (0, 1):
        raise FlowshopError("shift must be 0 or 1")
    row = timing.entries[machine - 1, schedule.indices]
    sums = np.cumsum(row)
    if shift:
        sums = np.concatenate([[0.0], sums[:-1]])
    return DiagonalCumulative(machine, shift, sums)


def frobenius_gap(a: DiagonalCumulative, b: DiagonalCumulative) -> float:
    if a.diagonal.shape != b.diagonal.shape:
        raise FlowshopError(
            f"size mismatch: {a.diagonal.size} vs {b.diagonal.size} diagonal entries"
        )
    return float(np.sqrt(np.sum((a.diagonal - b.diagonal) ** 2)))


# ------------------------------------------------------ permutation blocks


@lru_cache(maxsize=None)
def _lex_table(k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.array(list(itertools.permutations(range(k))), dtype=np.intp)


def _prefixes(elements: tuple[int, ...]) -> list[tuple[int, ...]]:
    depth = max(0, len(elements) - _TAIL)
    return list(itertools.permutations(elements, depth))


def _block(elements: tuple[int, ...], prefix: tuple[int, ...]) -> np.ndarray:
    rest = np.array([e for e in elements if e not in prefix], dtype=np.intp)
    tail = rest[_lex_table(rest.size)]
    head = np.broadcast_to(np.array(prefix, dtype=np.intp), (tail.shape[0], len(prefix)))
    return np.hstack([head, tail])


def lex_permutation_blocks(elements: Sequence[int]) -> Iterator[np.ndarray]:
    """Yield all permutations of ``elements`` as row blocks, in lexicographic order."""
    elements = tuple(sorted(elements))
    for prefix in _prefixes(elements):
        yield _block(elements, prefix)


# ----------------------------------------------------------- block scoring


def score_block(entries: np.ndarray, perms: np.ndarray, objective: str):
    """Completion time and objective criterion for each row of ``perms`` (0-based job indices)."""
    g = entries[:, perms]  # (M, B, N)
    grid = stage_grid(g)
    ct = grid.max(axis=0).sum(axis=-1)
    if objective == COMPLETION_TIME:
        crit = ct
    elif objective == WAIT_DIFFERENCE:
        totals = np.maximum.accumulate(grid, axis=0).sum(axis=-1)  # (M, B)
        waits = totals - entries.sum(axis=1)[:, None]
        crit = waits[-1] - waits[-2]
    elif objective == FIRST_LAST_LITERAL:
        crit = g[0].sum(axis=-1) - g[-1][:, :-1].sum(axis=-1)
    elif objective == FIRST_LAST_FROBENIUS:
        a = np.cumsum(g[0], axis=-1)
        c = np.cumsum(g[-1], axis=-1)
        c = np.concatenate([np.zeros(c.shape[:-1] + (1,)), c[:, :-1]], axis=-1)
        crit = np.sqrt(np.sum((a - c) ** 2, axis=-1))
    else:
        raise FlowshopError(f"unknown scan objective {objective!r}")
    return ct, crit


def _pick(values: np.ndarray, target: float, tie_break: str) -> int:
    hits = np.flatnonzero(np.abs(values - target) <= TIE_TOL)
    return int(hits[-1] if tie_break == LEX_LARGEST else hits[0])


@dataclass(frozen=True)
class _Summary:
    best_crit: float
    best_ct: float
    best_perm: tuple[int, ...]
    worst_ct: float
    worst_perm: tuple[int, ...]
    count: int


def _scan_block(entries, elements, prefix, first, last, objective, tie_break) -> _Summary:
    perms = _block(elements, prefix)
    cols = []
    if first is not None:
        cols.append(np.full((perms.shape[0], 1), first, dtype=np.intp))
    cols.append(perms)
    if last is not None:
        cols.append(np.full((perms.shape[0], 1), last, dtype=np.intp))
    perms = np.hstack(cols)
    ct, crit = score_block(entries, perms, objective)
    b = _pick(crit, crit.min(), tie_break)
    w = _pick(ct, ct.max(), tie_break)
    return _Summary(
        float(crit[b]), float(ct[b]), tuple(perms[b].tolist()),
        float(ct[w]), tuple(perms[w].tolist()), perms.shape[0],
    )


def _reduce(parts: Sequence[_Summary], tie_break: str) -> _Summary:
    # blocks arrive in lexicographic order, so a later tied block is the larger schedule
    later = TIE_TOL if tie_break == LEX_LARGEST else -TIE_TOL
    acc = parts[0]
    for s in parts[1:]:
        best = s if s.best_crit < acc.best_crit + later else acc
        worst = s if s.worst_ct > acc.worst_ct - later else acc
        acc = _Summary(
            best.best_crit, best.best_ct, best.best_perm,
            worst.worst_ct, worst.worst_perm, acc.count + s.count,
        )
    return acc


def exhaustive_scan(
    timing: TimingMatrix,
    objective: str = COMPLETION_TIME,
    first: int | None = None,
    last: int | None = None,
    workers: int = 1,
    tie_break: str = LEX_LARGEST,
) -> _Summary:
    """Scan every order of the jobs not pinned by ``first``/``last`` (1-based)."""
    if tie_break not in (LEX_LARGEST, LEX_SMALLEST):
        raise FlowshopError(f"unknown tie_break {tie_break!r}")
    n = timing.jobs
    pinned = {j - 1 for j in (first, last) if j is not None}
    elements = tuple(j for j in range(n) if j not in pinned)
    f = None if first is None else first - 1
    l = None if last is None else last - 1
    args = [
        (timing.entries, elements, p, f, l, objective, tie_break) for p in _prefixes(elements)
    ]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_block, *zip(*args), chunksize=4))
    else:
        parts = [_scan_block(*a) for a in args]
    return _reduce(parts, tie_break)


# ------------------------------------------------------------ algorithms


def _check_cap(size: int, cap: int, override: bool, what: str) -> None:
    if size > cap and not override:
        raise CapExceededError(
            f"{what} over N={size} jobs exceeds the cap of {cap}; "
            "pass an explicit override or use algorithm2"
        )


def _scale(instance: FlowshopInstance) -> float:
    return 1.0 / instance.p_success


def _result(summary: _Summary, objective, algorithm, fixed, scale=1.0) -> SearchResult:
    return SearchResult(
        best_schedule=Schedule.from_indices(summary.best_perm),
        best_value=summary.best_ct * scale,
        worst_schedule=Schedule.from_indices(summary.worst_perm),
        worst_value=summary.worst_ct * scale,
        objective=objective,
        permutations_examined=summary.count,
        criterion=None if objective == COMPLETION_TIME else summary.best_crit,
        algorithm=algorithm,
        fixed_endpoints=fixed,
    )


def brute_force(
    instance: FlowshopInstance,
    objective: str = COMPLETION_TIME,
    cap: int = FULL_SCAN_CAP,
    override: bool = False,
    workers: int = 1,
    tie_break: str = LEX_LARGEST,
) -> SearchResult:
    """Scan all N! schedules.

    With the completion-time objective, best and worst are the extreme
    completion times (scaled by 1/p_s under failures). With a criterion
    objective, best is the criterion minimiser and worst is still the
    slowest schedule; values are failure-free completion times.
    """
    if objective not in SCAN_OBJECTIVES:
        raise FlowshopError(f"objective {objective!r} cannot be scanned exhaustively")
    timing = instance.timing
    if objective != COMPLETION_TIME and timing.machines < 2:
        raise FlowshopError(f"{objective} criterion needs at least two machines (M = 1)")
    _check_cap(timing.jobs, cap, override, "full permutation scan")
    s = exhaustive_scan(timing, objective, workers=workers, tie_break=tie_break)
    scale = _scale(instance) if objective == COMPLETION_TIME else 1.0
    return _result(s, objective, "benchmark", False, scale)


def _endpoint_scan(instance, objective, algorithm, fix_endpoints, cap, override, workers, tie_break):
    timing = instance.timing
    if fix_endpoints:
        first, last = select_first_job(timing), select_last_job(timing)
        _check_cap(timing.jobs, cap, override, "interior permutation scan")
    else:
        first = last = None
        _check_cap(timing.jobs, FULL_SCAN_CAP, override, "full permutation scan")
    s = exhaustive_scan(timing, objective, first, last, workers, tie_break)
    scale = _scale(instance) if objective == COMPLETION_TIME else 1.0
    return _result(s, objective, algorithm, fix_endpoints, scale)


def algorithm1(
    instance: FlowshopInstance,
    fix_endpoints: bool = True,
    cap: int = INTERIOR_SCAN_CAP,
    override: bool = False,
    workers: int = 1,
    tie_break: str = LEX_LARGEST,
) -> SearchResult:
    """Pin the first and last jobs, then scan the (N-2)! interior orders for the fastest."""
    return _endpoint_scan(
        instance, COMPLETION_TIME, "alg1", fix_endpoints, cap, override, workers, tie_break
    )


def algorithm2(instance: FlowshopInstance) -> SearchResult:
    """Greedy min-max construction: one schedule, no search.

    After pinning the endpoints, position k is filled with the unused job c
    that minimises max{T(1,c), T(2,j_{k-1}), ..., T(min(k,M), j_{k-min(k,M)+1})},
    i.e. the length of the stage that c would open on machine 1.
    """
    timing = instance.timing
    t = timing.entries
    m, n = timing.shape
    first, last = select_first_job(timing) - 1, select_last_job(timing) - 1
    placed = [first]
    unused = sorted(set(range(n)) - {first, last})
    for k in range(2, n):
        depth = min(k, m)
        # already-placed operations on machines 2..depth in this stage
        others = [t[i, placed[k - 1 - i]] for i in range(1, depth)]
        floor = max(others, default=0.0)
        scores = [max(t[0, c], floor) for c in unused]
        pick = unused[int(np.argmin(scores))]
        placed.append(pick)
        unused.remove(pick)
    placed.append(last)
    sched = Schedule.from_indices(placed)
    value = ct_no_fail(timing, sched) * _scale(instance)
    return SearchResult(
        best_schedule=sched,
        best_value=value,
        worst_schedule=sched,
        worst_value=value,
        objective=MIN_MAX_GREEDY,
        permutations_examined=1,
        algorithm="alg2",
        fixed_endpoints=True,
    )


def _need_two_machines(instance: FlowshopInstance, name: str) -> None:
    if instance.timing.machines < 2:
        raise FlowshopError(f"{name} needs at least two machines (M = 1)")


def algorithm3(
    instance: FlowshopInstance,
    include_all_jobs: bool = False,
    cap: int = INTERIOR_SCAN_CAP,
    override: bool = False,
    workers: int = 1,
    tie_break: str = LEX_LARGEST,
) -> SearchResult:
    """Minimise wait(M) - wait(M-1) over the interior orders.

    ``include_all_jobs`` drops the endpoint pinning and scans all N! orders.
    """
    _need_two_machines(instance, "algorithm3")
    return _endpoint_scan(
        instance, WAIT_DIFFERENCE, "alg3", not include_all_jobs, cap, override, workers,
        tie_break,
    )


def algorithm4(
    instance: FlowshopInstance,
    mode: str = "frobenius",
    include_all_jobs: bool = False,
    cap: int = INTERIOR_SCAN_CAP,
    override: bool = False,
    workers: int = 1,
    tie_break: str = LEX_LARGEST,
) -> SearchResult:
    """Match the first and last machines' running totals.

    ``literal`` scores sum T(1,.) - sum of the first N-1 T(M,.); with pinned
    endpoints that value is the same for every interior order, so the
    lexicographically first interior wins. ``frobenius`` measures the gap
    between machine 1's running totals and machine M's running totals
    delayed by one slot.
    """
    _need_two_machines(instance, "algorithm4")
    objective = {"literal": FIRST_LAST_LITERAL, "frobenius": FIRST_LAST_FROBENIUS}.get(mode)
    if objective is None:
        raise FlowshopError(f"unknown algorithm4 mode {mode!r}; use literal or frobenius")
    return _endpoint_scan(
        instance, objective, "alg4", not include_all_jobs, cap, override, workers, tie_break
    )


def search_space_size(n: int, fixed_endpoints: bool) -> int:
    k = n - 2 if fixed_endpoints else n
    return math.factorial(max(k, 0))
