"""Linear costs over joint policies under an entropic (mutual-information) constraint.

The solver minimizes ``sum_s p_s <c[s], q[s]>`` over per-state joint
distributions ``q[s] in Delta(A x B)`` subject to ``g(q) <= 0``, with a
Bregman proximal gradient engine for the inner problems and bisection on the
Lagrange multiplier.
"""
from .attain import AttainReport, attainability_value, minimal_supports, solve_delta0
from .ba import ReducedInstance, ba_iteration, ba_solve, detect_reducible, lift_policy, reduced_constraint, tile
from .bpg import BpgConfig, BpgOutcome, TraceRecord, bpg_step, certificate_gap, objective_F, run_bpg
from .core import (
    ProblemInstance,
    SupportPattern,
    check_policy,
    cost_summary,
    expected_cost,
    marginal_b,
    normalize_costs,
    uniform_policy,
    validate_instance,
)
from .entropy import g_gradient, g_value, info_decomposition, kl_divergence, psi
from .errors import EntropicLPError, InputError, NumericalError
from .generators import RandomSpec, extended_instance, ghn_instance, random_instance
from .lagrange import (
    BisectionConfig,
    OuterRecord,
    Phase,
    SolveReport,
    bisection_solve,
    full_solve,
    g_monotonicity_check,
    k0_bound,
    lambda_max,
    solve_for_lambda,
)
from .oracle import GridResult, KktReport, ghn_analytic, grid_bruteforce, kkt_residual

__version__ = "0.1.0"

__all__ = [
    "AttainReport", "BisectionConfig", "BpgConfig", "BpgOutcome", "EntropicLPError", "GridResult",
    "InputError", "KktReport", "NumericalError", "OuterRecord", "Phase", "ProblemInstance",
    "RandomSpec", "ReducedInstance", "SolveReport", "SupportPattern", "TraceRecord",
    "attainability_value", "ba_iteration", "ba_solve", "bisection_solve", "bpg_step",
    "certificate_gap", "check_policy", "cost_summary", "detect_reducible", "expected_cost",
    "extended_instance", "full_solve", "g_gradient", "g_monotonicity_check", "g_value",
    "ghn_analytic", "ghn_instance", "grid_bruteforce", "info_decomposition", "k0_bound",
    "kkt_residual", "kl_divergence", "lambda_max", "lift_policy", "marginal_b", "minimal_supports",
    "normalize_costs", "objective_F", "psi", "random_instance", "reduced_constraint", "run_bpg",
    "solve_delta0", "solve_for_lambda", "tile", "uniform_policy", "validate_instance",
]
