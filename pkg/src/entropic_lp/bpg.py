"""Bregman proximal gradient engine on a product of restricted simplices.

The problem solved is

    minimize  F(q, eta) = g(q) + eta * sum_{s, (a,b) in pattern_s} d[s,a,b] q[s,a,b]

over policies supported on ``pattern``.  With the negative-entropy kernel the
proximal step has the closed form

    q_next[s,a,b] ∝ t_b * exp(-eta * d[s,a,b] / p_s),   t = marginal_b(q),

normalized per state over the pattern.  The weights ``exp(-eta d / p_s)`` are
shifted by their per-state maximum once; when a per-state normalizer of
``weight * t`` gets close to underflow, the step is redone in the log domain
with the shift taken over ``log weight + log t``.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import ProblemInstance, SupportPattern
from .entropy import kl_divergence
from .errors import InvalidConfig, NotInterior, NumericalUnderflow, ShapeMismatch

DEFAULT_MAX_INNER = 100_000
# below this per-state normalizer the update is redone in the log domain
FAST_PATH_FLOOR = 1e-200


@dataclass(frozen=True)
class BpgConfig:
    """Parameters of one engine run.

    Attributes:
        eta: weight of the linear tilt, ``eta >= 0``.
        tilt: tilt tensor ``d`` indexed ``(s, a, b)``; only pattern entries are
            used.  ``None`` means no tilt.
        eps_fixed: stop when ``||q_next - q||_2`` drops below this.
        max_inner: iteration cap.
        stride: record every ``stride``-th iteration in the trace (the last
            iteration is always recorded).
        keep_marginals: store ``T(q^n)`` for every ``n`` (needed by
            :func:`certificate_gap`).
        threads: split the per-state update over this many worker threads.
    """

    eta: float = 0.0
    tilt: np.ndarray | None = None
    eps_fixed: float = 1e-12
    max_inner: int = DEFAULT_MAX_INNER
    stride: int = 1
    keep_marginals: bool = False
    threads: int = 1

    def __post_init__(self):
        if not (self.eps_fixed > 0):
            raise InvalidConfig(f"eps_fixed must be positive, got {self.eps_fixed}")
        if self.max_inner < 1:
            raise InvalidConfig(f"max_inner must be at least 1, got {self.max_inner}")
        if not (self.eta >= 0) or not math.isfinite(self.eta):
            raise InvalidConfig(f"eta must be a finite nonnegative number, got {self.eta}")
        if self.stride < 1:
            raise InvalidConfig(f"stride must be at least 1, got {self.stride}")
        if self.threads < 1:
            raise InvalidConfig(f"threads must be at least 1, got {self.threads}")


@dataclass(frozen=True)
class TraceRecord:
    n: int
    objective_F: float
    g_val: float
    residual: float
    elapsed_s: float


@dataclass
class BpgOutcome:
    policy: np.ndarray
    iterations: int
    trace: list[TraceRecord]
    converged: bool
    final_F: float
    residual: float
    marginals: list[np.ndarray] | None = field(default=None, repr=False)


def _g_from(prior: np.ndarray, q: np.ndarray, t: np.ndarray) -> float:
    tb = np.broadcast_to(t[None, None, :], q.shape)
    # t_b can underflow to 0 under a subnormal q entry; that term is 0 in the limit
    pos = (q > 0) & (tb > 0)
    terms = np.zeros_like(q)
    terms[pos] = q[pos] * np.log(q[pos] / tb[pos])
    return float(prior @ terms.reshape(q.shape[0], -1).sum(axis=1))


class _Kernel:
    """Precomputed pieces of the update for a fixed (instance, pattern, eta, tilt)."""

    def __init__(self, inst: ProblemInstance, pattern: SupportPattern, cfg: BpgConfig):
        if pattern.shape != inst.shape:
            raise ShapeMismatch(f"pattern shape {pattern.shape} does not match instance {inst.shape}")
        self.prior = inst.prior
        self.mask = pattern.mask
        if cfg.tilt is None:
            tilt = np.zeros(inst.shape)
        else:
            tilt = np.asarray(cfg.tilt, dtype=float)
            if tilt.shape != inst.shape:
                raise ShapeMismatch(f"tilt shape {tilt.shape} does not match instance {inst.shape}")
        self.tilt = np.where(self.mask, tilt, 0.0)
        self.eta = cfg.eta
        # -eta d / p_s on the pattern, -inf elsewhere
        with np.errstate(invalid="ignore"):
            shift = -cfg.eta * self.tilt / self.prior[:, None, None]
        self.log_weight = np.where(self.mask, shift, -np.inf)
        # per-state max shift of the weights alone; the fast path multiplies by t
        with np.errstate(invalid="ignore"):
            top = self.log_weight.max(axis=(1, 2), keepdims=True)
            self.weight = np.exp(self.log_weight - top)
        self._fast = bool(np.all(np.isfinite(top)))
        # a sums of the shifted weights and of their squares, for the product form
        self.w = self.weight.sum(axis=1)
        self.w2 = (self.weight * self.weight).sum(axis=1)
        self.threads = cfg.threads
        self._chunks = np.array_split(np.arange(inst.num_s), min(cfg.threads, inst.num_s))

    def marginal(self, q: np.ndarray) -> np.ndarray:
        return self.prior @ q.sum(axis=1)

    def objective(self, q: np.ndarray, t: np.ndarray) -> tuple[float, float]:
        g = _g_from(self.prior, q, t)
        lin = float(np.sum(self.tilt * q)) if self.eta else 0.0
        return g + self.eta * lin, g

    def _update_states(self, logt: np.ndarray, states) -> np.ndarray:
        expo = self.log_weight[states] + logt
        expo -= expo.max(axis=(1, 2), keepdims=True)
        np.exp(expo, out=expo)
        z = expo.sum(axis=(1, 2), keepdims=True)
        # a state with no live entry gives nan here, a vanished one gives 0
        if not (z > 0).all():
            raise NumericalUnderflow("a state has no pattern entry with positive marginal")
        expo /= z
        return expo

    def factor(self, t: np.ndarray) -> np.ndarray | None:
        """``u[s, b] = t_b / z_s`` so that the next iterate is ``weight * u``.

        Returns ``None`` when some normalizer ``z_s`` is too small for the
        product form to be trusted.
        """
        if not self._fast:
            return None
        z = self.w @ t
        if not z.min() > FAST_PATH_FLOOR:
            return None
        return t / z[:, None]

    def expand(self, u: np.ndarray) -> np.ndarray:
        return self.weight * u[:, None, :]

    def step(self, t: np.ndarray) -> np.ndarray:
        u = self.factor(t) if self.threads == 1 else None
        if u is not None:
            return self.expand(u)
        return self.log_step(t)

    def log_step(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            logt = np.log(t)
            if self.threads == 1:
                return self._update_states(logt, slice(None))
            out = np.empty(self.mask.shape)
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                parts = pool.map(lambda idx: self._update_states(logt, idx), self._chunks)
                for idx, part in zip(self._chunks, parts):
                    out[idx] = part
        return out


def bpg_step(inst: ProblemInstance, pattern: SupportPattern, cfg: BpgConfig, q) -> np.ndarray:
    """One multiplicative proximal step from ``q``."""
    q = np.asarray(q, dtype=float)
    kernel = _Kernel(inst, pattern, cfg)
    return kernel.step(kernel.marginal(np.where(pattern.mask, q, 0.0)))


def _check_interior(q0: np.ndarray, pattern: SupportPattern):
    if q0.shape != pattern.shape:
        raise ShapeMismatch(f"start shape {q0.shape} does not match pattern {pattern.shape}")
    if np.any(q0[pattern.mask] <= 0):
        raise NotInterior("start point has a zero entry on the support pattern")
    if np.any(q0[~pattern.mask] != 0):
        raise NotInterior("start point has mass outside the support pattern")
    sums = q0.reshape(q0.shape[0], -1).sum(axis=1)
    if np.any(np.abs(sums - 1) > 1e-12):
        raise NotInterior(f"start point is not normalized per state: {sums.tolist()}")


def run_bpg(inst: ProblemInstance, pattern: SupportPattern, cfg: BpgConfig, q0) -> BpgOutcome:
    """Iterate :func:`bpg_step` until the step residual is below ``cfg.eps_fixed``.

    The residual is the Euclidean norm of ``q_next - q`` over the whole
    ``(s, a, b)`` tensor.  Hitting ``cfg.max_inner`` returns an outcome with
    ``converged=False``; the last iterate is kept either way.
    """
    q = np.array(q0, dtype=float, copy=True)
    _check_interior(q, pattern)
    kernel = _Kernel(inst, pattern, cfg)
    start = time.perf_counter()

    t = kernel.marginal(q)
    marginals = [t] if cfg.keep_marginals else None
    trace: list[TraceRecord] = []
    converged = False
    residual = math.inf
    # while u is set, the current iterate is kernel.expand(u) and q is stale
    u = None
    n = 0
    while n < cfg.max_inner:
        u_next = kernel.factor(t) if kernel.threads == 1 else None
        if u_next is not None and u is not None:
            d = u_next - u
            residual = math.sqrt(np.vdot(kernel.w2 * d, d))
            u = u_next
            t = kernel.prior @ (kernel.w * u)
        else:
            if u is not None:
                q = kernel.expand(u)
            q_next = kernel.expand(u_next) if u_next is not None else kernel.log_step(t)
            diff = (q_next - q).ravel()
            residual = math.sqrt(diff @ diff)
            q = q_next
            u = u_next
            t = kernel.marginal(q)
        n += 1
        if marginals is not None:
            marginals.append(t)
        converged = residual < cfg.eps_fixed
        last = converged or n == cfg.max_inner
        if last or n % cfg.stride == 0:
            if u is not None:
                q = kernel.expand(u)
            F, g = kernel.objective(q, t)
            trace.append(TraceRecord(n, F, g, residual, time.perf_counter() - start))
        if converged:
            break

    if u is not None:
        q = kernel.expand(u)
    final_F = trace[-1].objective_F
    return BpgOutcome(policy=q, iterations=n, trace=trace, converged=converged,
                      final_F=final_F, residual=residual, marginals=marginals)


def objective_F(inst: ProblemInstance, pattern: SupportPattern, cfg: BpgConfig, q) -> float:
    """``F(q, eta)`` for a policy supported on ``pattern``."""
    q = np.asarray(q, dtype=float)
    kernel = _Kernel(inst, pattern, cfg)
    q = np.where(pattern.mask, np.maximum(q, 0.0), 0.0)
    return kernel.objective(q, kernel.marginal(q))[0]


def certificate_gap(inst: ProblemInstance, pattern: SupportPattern, cfg: BpgConfig,
                    q0, q_ref, outcome: BpgOutcome, n: int | None = None) -> tuple[float, float]:
    """Both sides of the O(1/n) certificate after ``n`` iterations.

    ``lhs = n (F(q^n) - F(q_ref)) + sum_{k<n} D_B(T(q^{k+1}), T(q^k))`` and
    ``rhs = sum_s p_s D(q_ref^s, q0^s)``.  The bound ``lhs <= rhs`` holds for
    every reference point on the pattern, and is tight in the limit for a
    minimizer.  Needs an outcome produced with ``keep_marginals=True`` and
    ``stride=1``.
    """
    if outcome.marginals is None:
        raise InvalidConfig("certificate_gap needs an outcome run with keep_marginals=True")
    if n is None:
        n = outcome.iterations
    if not 0 <= n <= outcome.iterations:
        raise InvalidConfig(f"n={n} outside the recorded run of {outcome.iterations} iterations")
    q0 = np.asarray(q0, dtype=float)
    q_ref = np.asarray(q_ref, dtype=float)
    rhs = float(sum(inst.prior[s] * kl_divergence(q_ref[s], q0[s]) for s in range(inst.num_s)))
    if n == 0:
        return 0.0, rhs
    by_n = {rec.n: rec.objective_F for rec in outcome.trace}
    if n not in by_n:
        raise InvalidConfig(f"iteration {n} was not recorded (run with stride=1)")
    F_ref = objective_F(inst, pattern, cfg, q_ref)
    m = outcome.marginals
    drift = sum(kl_divergence(m[k + 1], m[k]) for k in range(n))
    return n * (by_n[n] - F_ref) + drift, rhs
