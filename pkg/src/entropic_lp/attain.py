"""Attainability phase: can the minimal cost be reached inside the feasible set?

The minimal cost ``c_min`` is attained exactly by policies supported on the
per-state argmin sets.  We minimize ``g`` over that face with the untilted
engine and compare the limit with zero.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bpg import BpgConfig, BpgOutcome, run_bpg
from .core import ProblemInstance, SupportPattern, cost_summary, uniform_policy
from .entropy import g_value
from .errors import NotAttainable

ATTAIN_TOL = 1e-9
TIE_TOL = 1e-12


@dataclass
class AttainReport:
    attainable: bool
    g_at_limit: float
    policy: np.ndarray
    iterations: int
    pattern: SupportPattern
    outcome: BpgOutcome | None = None


def minimal_supports(inst: ProblemInstance) -> SupportPattern:
    """Per-state sets of all ``(a, b)`` with cost at the state minimum.

    Ties are kept within ``1e-12 * max(1, |c_max|)``.
    """
    summary = cost_summary(inst)
    scale = max(1.0, float(np.abs(inst.cost).max()))
    return SupportPattern(inst.cost <= summary.c_min_s[:, None, None] + TIE_TOL * scale)


def solve_delta0(inst: ProblemInstance, cfg: BpgConfig | None = None, q0=None) -> AttainReport:
    """Minimize ``g`` over the minimal-cost face and decide attainability.

    ``cfg`` supplies the stopping rule; its tilt is ignored (the run is
    untilted).  The default start is uniform over each state's argmin set.
    """
    pattern = minimal_supports(inst)
    cfg = replace(cfg or BpgConfig(), eta=0.0, tilt=None)
    if q0 is None:
        q0 = uniform_policy(inst.shape, pattern)
    outcome = run_bpg(inst, pattern, cfg, q0)
    g = g_value(inst, outcome.policy)
    return AttainReport(attainable=g <= ATTAIN_TOL, g_at_limit=g, policy=outcome.policy,
                        iterations=outcome.iterations, pattern=pattern, outcome=outcome)


def attainability_value(inst: ProblemInstance, report: AttainReport, offsets=None) -> float:
    """``c_min`` (plus ``prior @ offsets``) for an attainable instance."""
    if not report.attainable:
        raise NotAttainable(f"g on the minimal-cost face is {report.g_at_limit:.6g} > 0")
    value = cost_summary(inst).c_min
    if offsets is not None:
        value += float(inst.prior @ np.asarray(offsets, dtype=float))
    return value
