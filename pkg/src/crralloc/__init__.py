"""Fair allocation of indivisible items under capacity constraints.

The central routine is :func:`w_crr`, a round-robin style picking procedure
that only lets an agent take an item when the partial allocation can still
be completed to one meeting a welfare goal.
"""
from .baseline import exact_baseline
from .crr import crr_run, make_sequence, sequential_allocation, w_crr
from .errors import (
    AllocationError,
    BudgetExceeded,
    IncompleteAllocation,
    InconsistentUtilities,
    Infeasible,
    InfeasibleCapacities,
    InvalidAllocation,
    MalformedProfile,
    NoFeasibleCompletion,
    ParseError,
    UnknownAlternative,
    UnsatisfiableGoal,
    UnsupportedSignMode,
)
from .experiment import ExperimentConfig, run_experiment
from .fairness import pairwise_report
from .formats import parse_allocation, parse_instance, parse_preflib, serialize_allocation, serialize_instance
from .mallows import MallowsConfig, mallows_profile
from .model import Allocation, Instance, build_instance, rank_vector, welfare
from .welfare import completion, make_goal, max_rank, max_utilitarian

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AllocationError",
    "BudgetExceeded",
    "ExperimentConfig",
    "IncompleteAllocation",
    "InconsistentUtilities",
    "Infeasible",
    "InfeasibleCapacities",
    "Instance",
    "InvalidAllocation",
    "MallowsConfig",
    "MalformedProfile",
    "NoFeasibleCompletion",
    "ParseError",
    "UnknownAlternative",
    "UnsatisfiableGoal",
    "UnsupportedSignMode",
    "build_instance",
    "completion",
    "crr_run",
    "exact_baseline",
    "make_goal",
    "make_sequence",
    "mallows_profile",
    "max_rank",
    "max_utilitarian",
    "pairwise_report",
    "parse_allocation",
    "parse_instance",
    "parse_preflib",
    "rank_vector",
    "run_experiment",
    "sequential_allocation",
    "serialize_allocation",
    "serialize_instance",
    "w_crr",
    "welfare",
]
