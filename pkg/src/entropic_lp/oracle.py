"""Independent checks: KKT residuals, the closed-form 2x2x2 solution, and a
grid brute force for tiny instances.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import ProblemInstance, expected_cost, marginal_b, validate_instance
from .entropy import g_value
from .errors import EmptySupport, InvalidLambda, TooLarge
from .generators import ghn_instance

GRID_FEASIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class KktReport:
    stationarity_residual: float
    primal_feasibility: float
    complementarity: float


def kkt_residual(inst: ProblemInstance, q, lam: float, support_floor: float = 1e-9) -> KktReport:
    """First-order residuals of ``(q, lam)`` for the constrained problem.

    On each state's support ``r[a, b] = c[s,a,b] + lam * ln(q[s,a,b] / t_b)``
    must be constant (the constant absorbs the simplex multiplier), so the
    stationarity residual is the largest per-state spread ``max r - min r``.
    """
    if not lam > 0:
        raise InvalidLambda(f"KKT check needs a positive multiplier, got {lam}")
    q = np.asarray(q, dtype=float)
    t = marginal_b(inst, q)
    spread = 0.0
    for s in range(inst.num_s):
        on = q[s] > support_floor
        if not on.any():
            raise EmptySupport(f"state {s} has no entry above {support_floor:g}")
        ratio = q[s][on] / np.broadcast_to(t[None, :], q[s].shape)[on]
        r = inst.cost[s][on] + lam * np.log(ratio)
        spread = max(spread, float(r.max() - r.min()))
    g = g_value(inst, q)
    return KktReport(stationarity_residual=spread, primal_feasibility=max(g, 0.0),
                     complementarity=abs(lam * g))


def ghn_analytic() -> tuple[float, np.ndarray, float]:
    """Closed-form optimum of the 2x2x2 coordination game.

    ``gamma`` solves ``h(gamma) + (1 - gamma) ln 3 = ln 2`` on ``(1/4, 1)``,
    where ``h`` is the binary entropy; the optimum puts ``gamma`` on the
    zero-cost cell of each state and ``(1 - gamma)/3`` on the other three.
    """
    def lhs(x):
        return -x * math.log(x) - (1 - x) * math.log(1 - x) + (1 - x) * math.log(3) - math.log(2)

    gamma = brentq(lhs, 0.25, 1 - 1e-15, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    q = np.full((2, 2, 2), (1 - gamma) / 3)
    q[0, 0, 0] = gamma
    q[1, 1, 1] = gamma
    return gamma, q, expected_cost(ghn_instance(), q)


@dataclass
class GridResult:
    best_value: float
    best_q: np.ndarray | None
    points_per_state: int
    diagnostic: str = ""

    @property
    def found(self) -> bool:
        return self.best_q is not None


def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``, lexicographic."""
    rows = []
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(total + parts - 1 - prev - 1)
        rows.append(row)
    return np.array(rows, dtype=np.int64)


def _entropy_rows(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(x > 0, -x * np.log(np.where(x > 0, x, 1.0)), 0.0)
    return terms.sum(axis=-1)


def grid_bruteforce(inst: ProblemInstance, resolution: int) -> GridResult:
    """Exhaustive minimum over the rational grid ``q[s] in (1/resolution) Z``.

    Uses ``g(q) = H(t) - sum_s p_s H(q^s)``: for two states the grid points of
    the second state are bucketed by their ``B``-marginal and sorted by
    entropy, so every pair of grid points is accounted for without forming the
    full product.  Returns an upper bound on the optimal value.
    """
    inst = validate_instance(inst)
    num_s, num_a, num_b = inst.shape
    if num_a * num_b > 4 or num_s > 2:
        raise TooLarge(f"grid oracle supports |A||B| <= 4 and |S| <= 2, got {inst.shape}")
    if not 1 <= resolution <= 200:
        raise TooLarge(f"resolution must be in [1, 200], got {resolution}")

    comp = _compositions(resolution, num_a * num_b)
    pts = comp / resolution
    ent = _entropy_rows(pts)
    marg_int = comp.reshape(-1, num_a, num_b).sum(axis=1)  # (M, B) integer marginals
    marg = marg_int / resolution
    costs = [pts @ inst.cost[s].ravel() for s in range(num_s)]
    p = inst.prior

    if num_s == 1:
        g = _entropy_rows(marg) - ent
        ok = np.flatnonzero(g <= GRID_FEASIBILITY_SLACK)
        if ok.size == 0:
            return GridResult(math.inf, None, len(pts), "no grid point satisfies g <= 0")
        i = ok[np.argmin(costs[0][ok])]
        return GridResult(float(costs[0][i]), pts[i].reshape(1, num_a, num_b), len(pts))

    best = (math.inf, -1, -1)
    keys, inverse = np.unique(marg_int, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    keys = keys / resolution
    # entropy of the joint marginal for every (state-0 bucket, state-1 bucket) pair
    h_t = _entropy_rows(p[0] * keys[:, None, :] + p[1] * keys[None, :, :])
    base = p[0] * ent + GRID_FEASIBILITY_SLACK
    for g_idx in range(len(keys)):
        members = np.flatnonzero(inverse == g_idx)
        order = members[np.argsort(ent[members], kind="stable")]
        h_sorted = ent[order]
        # suffix minimum of cost over points with entropy >= threshold
        suf_min = np.minimum.accumulate(costs[1][order][::-1])[::-1]
        need = (h_t[inverse, g_idx] - base) / p[1]
        pos = np.searchsorted(h_sorted, need, side="left")
        ok = np.flatnonzero(pos < len(order))
        if ok.size == 0:
            continue
        total = p[0] * costs[0][ok] + p[1] * suf_min[pos[ok]]
        j = int(np.argmin(total))
        if total[j] <= best[0]:
            i0 = int(ok[j])
            tail = order[pos[i0]:]
            i1 = int(tail[costs[1][tail] == costs[1][tail].min()].min())
            # ties go to the lexicographically smallest (state-0, state-1) index pair
            best = min(best, (float(total[j]), i0, i1)) if total[j] == best[0] else (float(total[j]), i0, i1)
    value, i0, i1 = best
    if i0 < 0:
        return GridResult(math.inf, None, len(pts), "no grid point satisfies g <= 0")
    q = np.stack([pts[i0], pts[i1]]).reshape(2, num_a, num_b)
    return GridResult(value, q, len(pts))
