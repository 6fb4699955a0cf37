"""Exact rectilinear embedding of a Steiner tree with fixed topology and
root-terminal length limits."""

from .components import (
    Axis,
    Component,
    affected_terminals,
    check_laminar,
    component_frontier,
    maximal_components,
    move_component,
    predict_deltas,
)
from .dp import DpContext, EvalContext, gamma, improve_round, local_search
from .errors import (
    BudgetExceeded,
    InfeasibleError,
    InstanceError,
    LocalOrderError,
    ParseError,
    SteinerError,
)
from .generate import GenSpec, gen_random
from .model import (
    INF,
    Embedding,
    HalfPoint,
    Instance,
    Terminal,
    ValidationReport,
    clamp_to_bbox,
    cost,
    extended_restrictions,
    is_feasible,
    normalize_topology,
    path_lengths,
    trivial_embedding,
    validate_instance,
)
from .oracle import OracleBudget, brute_force_optimum, enumerate_grid
from .scaling import Mode, SolveConfig, SolveReport, grid_exponent, repair, round_instance, solve, warm_start

__version__ = "0.1.0"
