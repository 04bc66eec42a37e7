"""Permutation flowshop scheduling under a stage-sum completion-time model with job failures."""

from .instance import (
    FailureModel,
    FlowshopError,
    FlowshopInstance,
    Schedule,
    TimingMatrix,
    apply_schedule,
    load_instance,
    parse_instance,
    staircase_layout,
    table_i,
)
from .evaluator import (
    ct_no_fail,
    ct_split_special,
    ct_with_fail,
    evaluate,
    machine_timelines,
    stage_times,
    waiting_diffs,
    weight_series,
    weighted_ct,
)
from .markov import analytic_ct, build_chain, expected_stage_visits, simulate_ct
from .search import (
    algorithm1,
    algorithm2,
    algorithm3,
    algorithm4,
    brute_force,
    cumulative_diagonal,
    frobenius_gap,
    select_first_job,
    select_last_job,
)
from .rounds import machine_rounds

__version__ = "0.1.0"
