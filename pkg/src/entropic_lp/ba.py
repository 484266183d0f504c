"""Blahut–Arimoto specialization for costs that do not depend on ``a``.

When ``c[s, a, b] = chat[s, b]`` the problem collapses to a distortion-rate
problem over ``Delta(B)^S`` with mutual-information budget ``ln|A|``; a
solution ``qhat`` lifts back as ``q[s, a, b] = qhat[s, b] / |A|`` with the same
value.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .attain import ATTAIN_TOL, TIE_TOL
from .core import ProblemInstance, validate_instance
from .entropy import ZERO_FLOOR
from .errors import (
    InvalidConfig,
    MaxInnerExceeded,
    NotInterior,
    NumericalUnderflow,
    ShapeMismatch,
)
from .lagrange import BisectionConfig, Phase, SolveReport, _bisect, _InnerResult

log = logging.getLogger(__name__)

REDUCE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ReducedInstance:
    prior: np.ndarray
    cost: np.ndarray  # (s, b)
    num_a: int

    def __post_init__(self):
        if self.num_a < 2:
            raise InvalidConfig(f"|A| must be at least 2, got {self.num_a}")
        prior = np.array(self.prior, dtype=float)
        cost = np.array(self.cost, dtype=float)
        if cost.ndim != 2 or cost.shape[0] != prior.shape[0]:
            raise ShapeMismatch(f"reduced cost must be (s, b) matching the prior, got {cost.shape}")
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "cost", cost)

    @property
    def budget(self) -> float:
        return math.log(self.num_a)

    @property
    def num_s(self) -> int:
        return self.cost.shape[0]

    @property
    def num_b(self) -> int:
        return self.cost.shape[1]

    def to_dict(self) -> dict:
        return {"p": self.prior.tolist(), "cost": self.cost.tolist(), "num_a": self.num_a}

    @classmethod
    def from_dict(cls, data: dict) -> "ReducedInstance":
        return cls(np.asarray(data["p"], float), np.asarray(data["cost"], float), int(data["num_a"]))


def detect_reducible(inst: ProblemInstance) -> ReducedInstance | None:
    """Return the reduction if every ``(s, b)`` slice is constant in ``a``."""
    slices = inst.cost
    spread = slices.max(axis=1) - slices.min(axis=1)
    scale = np.maximum(1.0, np.abs(slices).max(axis=1))
    if np.any(spread > REDUCE_TOL * scale):
        return None
    return ReducedInstance(inst.prior, inst.cost[:, 0, :], inst.num_a)


def tile(red: ReducedInstance) -> ProblemInstance:
    """The full instance whose costs repeat ``red.cost`` over every ``a``."""
    cost = np.repeat(red.cost[:, None, :], red.num_a, axis=1)
    return ProblemInstance(red.prior, cost)


def lift_policy(red: ReducedInstance, q_hat) -> np.ndarray:
    q_hat = np.asarray(q_hat, dtype=float)
    return np.repeat(q_hat[:, None, :], red.num_a, axis=1) / red.num_a


def reduced_marginal(red: ReducedInstance, q_hat) -> np.ndarray:
    return (red.prior[:, None] * np.asarray(q_hat, dtype=float)).sum(axis=0)


def reduced_constraint(red: ReducedInstance, q_hat) -> float:
    """Mutual information ``sum_s p_s sum_b qhat ln(qhat / T(qhat))``."""
    q_hat = np.asarray(q_hat, dtype=float)
    q_hat = np.where(q_hat < ZERO_FLOOR, 0.0, q_hat)
    t = reduced_marginal(red, q_hat)
    pos = q_hat > 0
    terms = np.zeros_like(q_hat)
    tb = np.broadcast_to(t[None, :], q_hat.shape)
    terms[pos] = q_hat[pos] * np.log(q_hat[pos] / tb[pos])
    return float(red.prior @ terms.sum(axis=1))


def _ba_loop(red: ReducedInstance, log_weight: np.ndarray, t0: np.ndarray,
             eps_f: float, max_inner: int, strict: bool = True) -> tuple[np.ndarray, np.ndarray, int, float]:
    """Alternating updates from ``t0``; with ``strict=False`` the cap returns the last iterate."""
    t = np.asarray(t0, dtype=float)
    q_prev = None
    residual = math.inf
    for n in range(1, max_inner + 1):
        with np.errstate(divide="ignore"):
            expo = log_weight + np.log(t)[None, :]
        expo -= expo.max(axis=1, keepdims=True)
        w = np.exp(expo)
        z = w.sum(axis=1, keepdims=True)
        if np.any(z <= 0):
            raise NumericalUnderflow("reduced normalizer vanished")
        q = w / z
        t = reduced_marginal(red, q)
        if q_prev is not None:
            residual = float(np.linalg.norm((q - q_prev).ravel()))
            if residual < eps_f:
                return q, t, n, residual
        q_prev = q
    if not strict:
        log.warning("reduced loop stopped at max_inner=%d (residual %.3g)", max_inner, residual)
        return q, t, max_inner, residual
    raise MaxInnerExceeded(f"Blahut–Arimoto loop did not reach {eps_f:g} in {max_inner} passes")


def ba_iteration(red: ReducedInstance, lam_hat: float, t0=None, eps_f: float = 1e-12,
                 max_inner: int = 100_000) -> tuple[np.ndarray, np.ndarray, int]:
    """Alternate ``qhat^s ∝ t * exp(-chat^s / lam_hat)`` and ``t = sum_s p_s qhat^s``.

    Stops when successive ``qhat`` differ by less than ``eps_f`` in the
    Euclidean norm.  Returns ``(qhat, t, passes)`` with ``t = T(qhat)``.
    """
    if not lam_hat > 0:
        raise InvalidConfig(f"lam_hat must be positive, got {lam_hat}")
    if t0 is None:
        t0 = np.full(red.num_b, 1.0 / red.num_b)
    t0 = np.asarray(t0, dtype=float)
    if t0.shape != (red.num_b,) or np.any(t0 <= 0):
        raise NotInterior("starting marginal must be strictly positive on B")
    q, t, n, _ = _ba_loop(red, -red.cost / lam_hat, t0 / t0.sum(), eps_f, max_inner)
    return q, t, n


def _reduced_attainability(red: ReducedInstance, cfg: BisectionConfig):
    """Minimize the reduced constraint over the per-state argmin sets of ``chat``."""
    scale = max(1.0, float(np.abs(red.cost).max()))
    support = red.cost <= red.cost.min(axis=1, keepdims=True) + TIE_TOL * scale
    log_weight = np.where(support, 0.0, -np.inf)
    t0 = reduced_marginal(red, support / support.sum(axis=1, keepdims=True))
    q, _, n, _ = _ba_loop(red, log_weight, t0, cfg.eps_f, cfg.max_inner)
    return q, reduced_constraint(red, q), n


def ba_solve(red: ReducedInstance, cfg: BisectionConfig | None = None) -> SolveReport:
    """Bisect on ``lam_hat`` until the reduced constraint meets ``ln|A|``.

    The report's ``policy`` is the lifted full policy; ``reduced_policy`` holds
    ``qhat``.  ``g`` is reported on the full-problem scale, i.e. as
    ``reduced_constraint - ln|A|``.
    """
    cfg = cfg or BisectionConfig()
    start = time.perf_counter()
    validate_instance(tile(red))
    offsets = red.cost.min(axis=1)
    work = ReducedInstance(red.prior, red.cost - offsets[:, None], red.num_a)
    shift = float(red.prior @ offsets)

    def value_of(q_hat):
        return float(red.prior @ (red.cost * q_hat).sum(axis=1))

    if not np.any(work.cost > 0):
        q_hat = np.full(red.cost.shape, 1.0 / red.num_b)
        return SolveReport(value=shift, lam=0.0, policy=lift_policy(red, q_hat),
                           g_val=reduced_constraint(red, q_hat) - red.budget,
                           phase=Phase.DEGENERATE, elapsed_s=time.perf_counter() - start,
                           offsets=offsets, reduced_policy=q_hat)

    q_att, g_att, n_att = _reduced_attainability(work, cfg)
    if g_att - red.budget <= ATTAIN_TOL:
        return SolveReport(value=shift, lam=0.0, policy=lift_policy(red, q_att),
                           g_val=g_att - red.budget, phase=Phase.ATTAINABLE,
                           inner_iterations_total=n_att, elapsed_s=time.perf_counter() - start,
                           offsets=offsets, reduced_policy=q_att)

    spread = float(red.prior @ work.cost.max(axis=1))
    q_uniform = np.full(red.cost.shape, 1.0 / red.num_b)

    def inner(lam, t_start):
        q, t, n, residual = _ba_loop(work, -work.cost / lam, t_start, cfg.eps_f, cfg.max_inner, strict=False)
        return _InnerResult(q, reduced_constraint(work, q) - red.budget, n, residual, [])

    # the loop restarts from the marginal of the previous policy
    def inner_from_policy(lam, start_q):
        return inner(lam, reduced_marginal(work, start_q))

    run = _bisect(spread / red.budget, inner_from_policy, q_uniform, cfg, value_fn=value_of)
    q_hat = run["result"].q
    return SolveReport(
        value=value_of(q_hat),
        lam=run["lam"],
        policy=lift_policy(red, q_hat),
        g_val=run["result"].g,
        phase=Phase.ACTIVE,
        outer_iterations=run["outer"],
        inner_iterations_total=run["inner_total"] + n_att,
        traces=run["records"],
        elapsed_s=time.perf_counter() - start,
        offsets=offsets,
        reduced_policy=q_hat,
    )
