"""Exact and approximate solvers for election bribery with per-move prices."""

from ._accel import NUMBA_ENABLED
from .election import (
    Ballot,
    CandidateSet,
    InvalidElection,
    KBElection,
    ScoreVector,
    encode_rule,
    tally,
    validate,
    winners,
)
from .flow import Flow, FlowNetwork, solve_min_cost_flow, verify_optimality
from .kb import (
    BriberyPlan,
    Infeasible,
    KBBriberyInstance,
    Move,
    PriceTable,
    SolveOutcome,
    apply_plan,
    build_network,
    decide,
    solve_optimal,
)
from .weighted import (
    ApprovalPrimeInstance,
    NegativeBriberyInstance,
    Weighted11Instance,
    WeightedPluralityInstance,
    fptas,
    fptas_strict,
    reduce_negative_bribery,
    scale_prices,
    solve_approval_prime_exact,
    solve_plurality_exact,
)

__version__ = "0.1.0"
