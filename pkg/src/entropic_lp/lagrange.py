"""Active-constraint phase: Lagrangian inner solver and multiplier bisection.

For a multiplier ``lam > 0`` the Lagrangian ``<c, q>_p + lam * g(q)`` is
minimized by the engine with ``eta = 1/lam`` and tilt ``d[s,a,b] = p_s c[s,a,b]``,
which turns the update into

    q_next[s,a,b] ∝ t_b * exp(-c[s,a,b] / lam).

``g`` at the inner limit is nonincreasing in ``lam``, positive on the
minimal-cost face and negative at ``lam_max = (c_max - c_min) / ln|A|``, so the
multiplier with ``g = 0`` is found by bisection on ``[0, lam_max]``.
"""
from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .attain import AttainReport, solve_delta0
from .bpg import DEFAULT_MAX_INNER, BpgConfig, BpgOutcome, TraceRecord, run_bpg
from .core import (
    ProblemInstance,
    SupportPattern,
    cost_summary,
    expected_cost,
    normalize_costs,
    uniform_policy,
    validate_instance,
)
from .entropy import g_value
from .errors import (
    BracketFailure,
    DegenerateCosts,
    InvalidConfig,
    InvalidLambda,
    MaxOuterExceeded,
    NumericalError,
)

log = logging.getLogger(__name__)

WARM_BLEND = 1e-6


class Phase(str, enum.Enum):
    ATTAINABLE = "Attainable"
    ACTIVE = "Active"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class BisectionConfig:
    """Tolerances and switches for the multiplier search.

    ``eps_b`` bounds the final bracket width, ``eps_f`` is the inner
    fixed-point tolerance, and ``zero_band`` is the dead band around ``g = 0``
    that ends the search early.
    A warm start reuses the previous inner limit as is when all its entries
    are at least ``warm_floor``, and otherwise blends it with the cold start
    (weight ``WARM_BLEND``).  Entries that have collapsed towards zero
    recover too slowly under multiplicative updates, and the step residual
    can fall below ``eps_f`` long before they do.
    """

    eps_b: float = 1e-10
    eps_f: float = 1e-12
    zero_band: float = 1e-20
    max_outer: int = 200
    max_inner: int = DEFAULT_MAX_INNER
    warm_start: bool = True
    check_bracket: bool = True
    stride: int = 1
    threads: int = 1
    record_inner: bool = False
    warm_floor: float = 1e-10

    def __post_init__(self):
        if not (0 < self.eps_f < self.eps_b):
            raise InvalidConfig(f"need 0 < eps_f < eps_b, got eps_f={self.eps_f}, eps_b={self.eps_b}")
        if not (self.zero_band >= 0):
            raise InvalidConfig(f"zero_band must be nonnegative, got {self.zero_band}")
        if not (0 < self.warm_floor < 1):
            raise InvalidConfig(f"warm_floor must lie in (0, 1), got {self.warm_floor}")
        if self.max_outer < 1 or self.max_inner < 1:
            raise InvalidConfig("max_outer and max_inner must be positive")

    @classmethod
    def high_dimensional(cls, **overrides) -> "BisectionConfig":
        """Looser preset used for the large random instances."""
        return cls(**{"eps_b": 1e-6, "eps_f": 1e-8, **overrides})

    def inner(self) -> BpgConfig:
        return BpgConfig(eps_fixed=self.eps_f, max_inner=self.max_inner,
                         stride=self.stride, threads=self.threads)


@dataclass(frozen=True)
class OuterRecord:
    k: int
    lam: float
    value: float
    g_val: float
    residual: float
    elapsed_s: float
    inner_iterations: int


@dataclass
class SolveReport:
    value: float
    lam: float
    policy: np.ndarray
    g_val: float
    phase: Phase
    outer_iterations: int = 0
    inner_iterations_total: int = 0
    traces: list[OuterRecord] = field(default_factory=list)
    elapsed_s: float = 0.0
    offsets: np.ndarray | None = None
    inner_traces: list[list[TraceRecord]] | None = field(default=None, repr=False)
    attain: AttainReport | None = field(default=None, repr=False)
    reduced_policy: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "value": self.value,
            "lambda": self.lam,
            "g": self.g_val,
            "phase": self.phase.value,
            "outer_iterations": self.outer_iterations,
            "inner_iterations_total": self.inner_iterations_total,
            "elapsed_s": self.elapsed_s if timing else 0.0,
            "policy": np.asarray(self.policy).tolist(),
        }


def lagrangian_config(inst: ProblemInstance, lam: float, base: BpgConfig) -> BpgConfig:
    if not (lam > 0) or not math.isfinite(lam):
        raise InvalidLambda(f"multiplier must be positive and finite, got {lam}")
    return BpgConfig(eta=1.0 / lam, tilt=inst.prior[:, None, None] * inst.cost,
                     eps_fixed=base.eps_fixed, max_inner=base.max_inner, stride=base.stride,
                     keep_marginals=base.keep_marginals, threads=base.threads)


def solve_for_lambda(inst: ProblemInstance, lam: float, cfg: BisectionConfig | BpgConfig | None = None,
                     q0=None) -> BpgOutcome:
    """Approximate a minimizer of the Lagrangian at multiplier ``lam``."""
    if cfg is None:
        cfg = BisectionConfig()
    base = cfg.inner() if isinstance(cfg, BisectionConfig) else cfg
    bcfg = lagrangian_config(inst, lam, base)
    if q0 is None:
        q0 = uniform_policy(inst.shape)
    return run_bpg(inst, SupportPattern.full(inst.shape), bcfg, q0)


def lambda_max(inst: ProblemInstance) -> float:
    """Upper end of the multiplier bracket, ``(c_max - c_min) / ln|A|``."""
    summary = cost_summary(inst)
    spread = summary.c_max - summary.c_min
    if not spread > 0:
        raise DegenerateCosts("c_max == c_min: the multiplier bracket is empty")
    return spread / math.log(inst.num_a)


def k0_bound(inst: ProblemInstance, eps_b: float) -> int:
    """Outer iterations after which the bracket midpoint is within ``eps_b``."""
    return int(math.floor(math.log2(lambda_max(inst) / eps_b))) + 1


@dataclass
class _InnerResult:
    q: np.ndarray
    g: float
    iterations: int
    residual: float
    trace: list[TraceRecord]


def _bisect(lam_hi: float, inner: Callable[[float, np.ndarray], _InnerResult], q0: np.ndarray,
            cfg: BisectionConfig, value_fn: Callable[[np.ndarray], float]) -> dict:
    """Shared multiplier search over ``[0, lam_hi]``; ``inner`` returns g-values already offset."""
    start = time.perf_counter()
    inner_total = 0
    if cfg.check_bracket:
        top = inner(lam_hi, q0)
        inner_total += top.iterations
        if not top.g < 0:
            raise BracketFailure(f"g at lambda_max={lam_hi:.6g} is {top.g:.3g}, expected < 0")

    lo, hi = 0.0, lam_hi
    q_start = q0
    records: list[OuterRecord] = []
    inner_traces: list[list[TraceRecord]] | None = [] if cfg.record_inner else None
    lam = hi
    result = None
    k = 0
    while hi - lo >= cfg.eps_b:
        if k >= cfg.max_outer:
            raise MaxOuterExceeded(f"bracket width {hi - lo:.3g} after {k} outer iterations")
        lam = 0.5 * (lo + hi)
        result = inner(lam, q_start)
        if math.isnan(result.g):
            raise NumericalError(f"constraint value is NaN at lambda={lam!r}")
        inner_total += result.iterations
        k += 1
        records.append(OuterRecord(k, lam, value_fn(result.q), result.g, result.residual,
                                   time.perf_counter() - start, result.iterations))
        if inner_traces is not None:
            inner_traces.append(result.trace)
        if result.g < -cfg.zero_band:
            hi = lam
        elif result.g > cfg.zero_band:
            lo = lam
        else:
            lo = hi = lam
        if not cfg.warm_start:
            q_start = q0
        elif result.q.min() >= cfg.warm_floor:
            q_start = result.q
        else:
            q_start = (1.0 - WARM_BLEND) * result.q + WARM_BLEND * q0
    if result is None:
        raise InvalidConfig(f"eps_b={cfg.eps_b} exceeds the initial bracket width {lam_hi:.6g}")
    return dict(lam=lam, result=result, outer=k, inner_total=inner_total, records=records,
                inner_traces=inner_traces, elapsed=time.perf_counter() - start, bracket=(lo, hi))


def bisection_solve(inst: ProblemInstance, cfg: BisectionConfig | None = None, q0=None,
                    offsets=None) -> SolveReport:
    """Multiplier bisection for an instance whose minimal cost is not attainable.

    ``inst`` should already be normalized; ``offsets`` (from
    :func:`normalize_costs`) are added back to the reported value.
    """
    cfg = cfg or BisectionConfig()
    if q0 is None:
        q0 = uniform_policy(inst.shape)
    offsets = np.zeros(inst.num_s) if offsets is None else np.asarray(offsets, dtype=float)
    shift = float(inst.prior @ offsets)
    base = cfg.inner()
    if not cfg.record_inner:
        # only the final inner record is needed
        base = replace(base, stride=base.max_inner)
    full = SupportPattern.full(inst.shape)

    def inner(lam, q_start):
        out = run_bpg(inst, full, lagrangian_config(inst, lam, base), q_start)
        if not out.converged:
            log.warning("inner solve at lambda=%.6g stopped at max_inner=%d (residual %.3g)",
                        lam, cfg.max_inner, out.residual)
        return _InnerResult(out.policy, g_value(inst, out.policy), out.iterations,
                            out.residual, out.trace)

    run = _bisect(lambda_max(inst), inner, q0, cfg,
                  value_fn=lambda q: expected_cost(inst, q) + shift)
    q = run["result"].q
    return SolveReport(
        value=expected_cost(inst, q) + shift,
        lam=run["lam"],
        policy=q,
        g_val=run["result"].g,
        phase=Phase.ACTIVE,
        outer_iterations=run["outer"],
        inner_iterations_total=run["inner_total"],
        traces=run["records"],
        elapsed_s=run["elapsed"],
        offsets=offsets,
        inner_traces=run["inner_traces"],
    )


def g_monotonicity_check(inst: ProblemInstance, lam1: float, lam2: float,
                         cfg: BisectionConfig | BpgConfig | None = None) -> tuple[float, float]:
    """``g`` at the inner limits for ``lam1 <= lam2``; the first should dominate."""
    if lam1 > lam2:
        raise InvalidLambda(f"need lam1 <= lam2, got {lam1} > {lam2}")
    g1 = g_value(inst, solve_for_lambda(inst, lam1, cfg).policy)
    if lam1 == lam2:
        return g1, g1
    g2 = g_value(inst, solve_for_lambda(inst, lam2, cfg).policy)
    return g1, g2


def full_solve(inst: ProblemInstance, cfg: BisectionConfig | None = None, q0=None) -> SolveReport:
    """Validate, normalize, test attainability, then bisect if the constraint is active."""
    cfg = cfg or BisectionConfig()
    start = time.perf_counter()
    original = validate_instance(inst)
    try:
        work, offsets = normalize_costs(original)
    except DegenerateCosts as exc:
        q = uniform_policy(original.shape)
        return SolveReport(value=float(original.prior @ exc.offsets), lam=0.0, policy=q,
                           g_val=g_value(original, q), phase=Phase.DEGENERATE,
                           elapsed_s=time.perf_counter() - start, offsets=exc.offsets)

    attain = solve_delta0(work, cfg.inner())
    if attain.attainable:
        return SolveReport(value=float(original.prior @ offsets), lam=0.0, policy=attain.policy,
                           g_val=attain.g_at_limit, phase=Phase.ATTAINABLE,
                           inner_iterations_total=attain.iterations,
                           elapsed_s=time.perf_counter() - start, offsets=offsets, attain=attain)

    report = bisection_solve(work, cfg, q0=q0, offsets=offsets)
    report.inner_iterations_total += attain.iterations
    report.attain = attain
    report.value = expected_cost(original, report.policy)
    report.elapsed_s = time.perf_counter() - start
    return report
