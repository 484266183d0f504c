"""Entropic building blocks: psi, KL divergence, the constraint g and its gradient.

All logarithms are natural.  The convention ``0 ln 0 = 0`` is applied by an
explicit branch, never by letting ``0 * log(0)`` produce NaN.  Infinite values
are returned as ``math.inf``.
"""
from __future__ import annotations

import math

import numpy as np

from .core import SUPPORT_TOL, ProblemInstance, SupportPattern, _marginal, marginal_b
from .errors import BoundaryPoint, ShapeMismatch

# entries below this are treated as exact zeros
ZERO_FLOOR = 1e-300


def psi(xi: float, mu: float) -> float:
    """``xi ln(xi/mu)`` with its lower semicontinuous extension.

    >>> psi(0.0, 0.5), psi(0.5, 0.5), psi(0.3, 0.0)
    (0.0, 0.0, inf)
    """
    xi, mu = float(xi), float(mu)
    if abs(xi) < ZERO_FLOOR:
        xi = 0.0
    if abs(mu) < ZERO_FLOOR:
        mu = 0.0
    if xi > 0 and mu > 0:
        return xi * math.log(xi / mu)
    if xi == 0 and mu >= 0:
        return 0.0
    return math.inf


def _psi_sum(x: np.ndarray, u: np.ndarray) -> float:
    """Vectorized ``sum psi(x_i, u_i)``; returns inf on a support violation."""
    x = np.where(np.abs(x) < ZERO_FLOOR, 0.0, x)
    u = np.where(np.abs(u) < ZERO_FLOOR, 0.0, u)
    if np.any(x < 0) or np.any((x == 0) & (u < 0)):
        return math.inf
    pos = x > 0
    if np.any(u[pos] <= 0):
        return math.inf
    xp = x[pos]
    return float(np.sum(xp * (np.log(xp) - np.log(u[pos]))))


def kl_divergence(q, u) -> float:
    """``sum_i psi(q_i, u_i)``; ``inf`` iff ``supp(q)`` is not inside ``supp(u)``."""
    q = np.asarray(q, dtype=float)
    u = np.asarray(u, dtype=float)
    if q.shape != u.shape:
        raise ShapeMismatch(f"shapes differ: {q.shape} vs {u.shape}")
    return _psi_sum(q.ravel(), u.ravel())


def _clamp(q: np.ndarray) -> np.ndarray | None:
    if np.any(q < -SUPPORT_TOL):
        return None
    return np.where(q < ZERO_FLOOR, 0.0, q)


def g_value(inst: ProblemInstance, q) -> float:
    """Averaged KL constraint ``g(q) = sum_s p_s D(q^s, Lambda(q))``.

    ``Lambda(q)[a, b] = t_b`` is the prior-averaged ``B``-marginal.  Returns
    ``inf`` for policies with negative entries (beyond round-off).
    """
    q = np.asarray(q, dtype=float)
    if q.shape != inst.shape:
        raise ShapeMismatch(f"policy shape {q.shape} does not match instance shape {inst.shape}")
    q = _clamp(q)
    if q is None:
        return math.inf
    t = _marginal(inst.prior, q)
    pos = q > 0
    tb = np.broadcast_to(t[None, None, :], q.shape)
    if np.any(tb[pos] <= 0):
        return math.inf
    terms = np.zeros_like(q)
    terms[pos] = q[pos] * np.log(q[pos] / tb[pos])
    return float(inst.prior @ terms.reshape(inst.num_s, -1).sum(axis=1))


def g_gradient(inst: ProblemInstance, q, pattern: SupportPattern | None = None) -> np.ndarray:
    """Gradient of ``g`` restricted to ``pattern``: ``p_s ln(q[s,a,b] / t_b)``.

    Entries off the pattern are returned as zero.

    Raises:
        BoundaryPoint: if ``q`` is not strictly positive on the pattern.
    """
    q = np.asarray(q, dtype=float)
    if pattern is None:
        pattern = SupportPattern.full(inst.shape)
    t = marginal_b(inst, q, pattern)
    mask = pattern.mask
    if np.any(q[mask] <= 0):
        raise BoundaryPoint("gradient of g needs a strictly positive point on the pattern")
    grad = np.zeros_like(q)
    ratio = q / t[None, None, :]
    grad[mask] = (inst.prior[:, None, None] * np.log(np.where(mask, ratio, 1.0)))[mask]
    return grad


def info_decomposition(inst: ProblemInstance, q) -> tuple[float, float]:
    """Split ``g`` into mutual information ``I(b; s)`` and entropy ``H(a | b, s)``.

    ``g = I(b; s) - H(a | b, s)`` whenever both are finite.  Terms with a zero
    denominator contribute zero.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != inst.shape:
        raise ShapeMismatch(f"policy shape {q.shape} does not match instance shape {inst.shape}")
    q = np.where(q < ZERO_FLOOR, 0.0, np.maximum(q, 0.0))
    p = inst.prior
    qb = q.sum(axis=1)  # (s, b): per-state b-marginal
    t = (p[:, None] * qb).sum(axis=0)

    pos = qb > 0
    mi_terms = np.zeros_like(qb)
    ratio = np.divide(qb, t[None, :], out=np.ones_like(qb), where=pos)
    mi_terms[pos] = qb[pos] * np.log(ratio[pos])
    mutual_info = float(p @ mi_terms.sum(axis=1))

    pos = q > 0
    ce_terms = np.zeros_like(q)
    qb_full = np.broadcast_to(qb[:, None, :], q.shape)
    ce_terms[pos] = q[pos] * np.log(qb_full[pos] / q[pos])
    cond_entropy = float(p @ ce_terms.reshape(inst.num_s, -1).sum(axis=1))
    return mutual_info, cond_entropy
