"""Instances, policies and simplex bookkeeping.

Every tensor in the package is indexed ``(s, a, b)``: state, first action,
second action.  A *policy* ``q`` is an array of that shape whose slices
``q[s]`` are probability distributions over ``A x B``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateCosts,
    InvalidPolicy,
    InvalidSupport,
    NonFiniteCost,
    NonPositivePrior,
    PriorNotNormalized,
    ShapeMismatch,
    SupportViolation,
    TooFewActions,
)

SIMPLEX_TOL = 1e-12
SUPPORT_TOL = 1e-14


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Prior ``p`` over states and cost tensor ``c[s, a, b]``.

    Construction only checks shapes; use :func:`validate_instance` to enforce
    the problem hypotheses (positive normalized prior, at least two actions,
    finite costs).
    """

    prior: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        prior = _frozen(self.prior)
        cost = _frozen(self.cost)
        if prior.ndim != 1:
            raise ShapeMismatch(f"prior must be a vector, got shape {prior.shape}")
        if cost.ndim != 3:
            raise ShapeMismatch(f"cost must be indexed (s, a, b), got shape {cost.shape}")
        if cost.shape[0] != prior.shape[0]:
            raise ShapeMismatch(
                f"prior has {prior.shape[0]} states but cost has {cost.shape[0]}")
        if min(cost.shape) < 1:
            raise ShapeMismatch(f"empty alphabet in cost shape {cost.shape}")
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "cost", cost)

    @property
    def num_s(self) -> int:
        return self.cost.shape[0]

    @property
    def num_a(self) -> int:
        return self.cost.shape[1]

    @property
    def num_b(self) -> int:
        return self.cost.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.cost.shape

    def to_dict(self) -> dict:
        return {"p": self.prior.tolist(), "cost": self.cost.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemInstance":
        try:
            prior, cost = data["p"], data["cost"]
        except (KeyError, TypeError) as exc:
            raise ShapeMismatch("instance JSON needs keys 'p' and 'cost'") from exc
        try:
            return cls(np.asarray(prior, dtype=float), np.asarray(cost, dtype=float))
        except ValueError as exc:  # ragged nesting
            raise ShapeMismatch(f"malformed instance arrays: {exc}") from exc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "ProblemInstance":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "ProblemInstance":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class CostSummary:
    c_min_s: np.ndarray
    c_min: float
    c_max_s: np.ndarray
    c_max: float


class SupportPattern:
    """Per-state sets of allowed ``(a, b)`` pairs, stored as a boolean mask."""

    def __init__(self, mask):
        mask = np.array(mask, dtype=bool, copy=True)
        if mask.ndim != 3:
            raise InvalidSupport(f"support mask must be 3-d, got shape {mask.shape}")
        if not mask.reshape(mask.shape[0], -1).any(axis=1).all():
            raise InvalidSupport("every state needs a nonempty support")
        mask.setflags(write=False)
        self.mask = mask

    @classmethod
    def full(cls, shape: Sequence[int]) -> "SupportPattern":
        return cls(np.ones(shape, dtype=bool))

    @classmethod
    def from_pairs(cls, shape: Sequence[int],
                   supports: Iterable[Iterable[tuple[int, int]]]) -> "SupportPattern":
        mask = np.zeros(shape, dtype=bool)
        supports = list(supports)
        if len(supports) != shape[0]:
            raise InvalidSupport(f"need {shape[0]} per-state supports, got {len(supports)}")
        for s, pairs in enumerate(supports):
            for a, b in pairs:
                if not (0 <= a < shape[1] and 0 <= b < shape[2]):
                    raise InvalidSupport(f"pair {(a, b)} out of range for state {s}")
                mask[s, a, b] = True
        return cls(mask)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.mask.shape

    def pairs(self, s: int) -> list[tuple[int, int]]:
        return [tuple(map(int, ab)) for ab in np.argwhere(self.mask[s])]

    def sizes(self) -> np.ndarray:
        return self.mask.reshape(self.mask.shape[0], -1).sum(axis=1)

    def __eq__(self, other):
        return isinstance(other, SupportPattern) and np.array_equal(self.mask, other.mask)

    def __repr__(self):
        return f"SupportPattern(shape={self.shape}, sizes={self.sizes().tolist()})"


def validate_instance(inst: ProblemInstance) -> ProblemInstance:
    """Check the problem hypotheses and return a validated copy.

    A prior whose sum is within ``1e-12`` of one is renormalized; anything
    further off is rejected.  Zero prior entries are rejected outright (the
    prior must lie in the relative interior of the simplex).
    """
    if not isinstance(inst, ProblemInstance):
        raise ShapeMismatch(f"expected a ProblemInstance, got {type(inst).__name__}")
    if inst.num_a < 2:
        raise TooFewActions(f"|A| must be at least 2, got {inst.num_a}")
    if not np.all(np.isfinite(inst.prior)):
        raise NonPositivePrior("prior has non-finite entries")
    if np.any(inst.prior <= 0):
        raise NonPositivePrior(f"prior entries must be strictly positive: {inst.prior.tolist()}")
    total = float(inst.prior.sum())
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise PriorNotNormalized(f"prior sums to {total!r}")
    if not np.all(np.isfinite(inst.cost)):
        raise NonFiniteCost("cost tensor has non-finite entries")
    return ProblemInstance(inst.prior / total, inst.cost)


def cost_summary(inst: ProblemInstance) -> CostSummary:
    flat = inst.cost.reshape(inst.num_s, -1)
    c_min_s = flat.min(axis=1)
    c_max_s = flat.max(axis=1)
    return CostSummary(
        c_min_s=c_min_s,
        c_min=float(inst.prior @ c_min_s),
        c_max_s=c_max_s,
        c_max=float(inst.prior @ c_max_s),
    )


def normalize_costs(inst: ProblemInstance) -> tuple[ProblemInstance, np.ndarray]:
    """Shift every state's costs so that its minimum is zero.

    Returns the shifted instance and the per-state offsets.  Optimal policies
    do not change; the optimal value drops by ``prior @ offsets``.

    Raises:
        DegenerateCosts: if the shifted costs are identically zero.  The
            exception carries ``instance`` and ``offsets``.
    """
    offsets = inst.cost.reshape(inst.num_s, -1).min(axis=1)
    shifted = ProblemInstance(inst.prior, inst.cost - offsets[:, None, None])
    if not np.any(shifted.cost > 0):
        raise DegenerateCosts("costs are constant within every state; any feasible point is optimal",
                              instance=shifted, offsets=offsets)
    return shifted, offsets


def check_policy(q, shape: Sequence[int] | None = None) -> np.ndarray:
    """Validate a joint policy and return it renormalized per state.

    Entries in ``[-1e-14, 0)`` are clamped to zero; per-state sums within
    ``1e-12`` of one are renormalized, anything else is rejected.
    """
    q = np.array(q, dtype=float, copy=True)
    if q.ndim != 3:
        raise ShapeMismatch(f"policy must be indexed (s, a, b), got shape {q.shape}")
    if shape is not None and tuple(q.shape) != tuple(shape):
        raise ShapeMismatch(f"policy shape {q.shape} does not match instance shape {tuple(shape)}")
    if not np.all(np.isfinite(q)):
        raise InvalidPolicy("policy has non-finite entries")
    if np.any(q < -SUPPORT_TOL):
        raise InvalidPolicy("policy has negative entries")
    q[q < 0] = 0.0
    sums = q.reshape(q.shape[0], -1).sum(axis=1)
    if np.any(np.abs(sums - 1.0) > SIMPLEX_TOL):
        raise InvalidPolicy(f"per-state sums deviate from 1: {sums.tolist()}")
    return q / sums[:, None, None]


def uniform_policy(shape: Sequence[int], pattern: SupportPattern | None = None) -> np.ndarray:
    """Uniform distribution per state, over the pattern if one is given."""
    if pattern is None:
        num_s, num_a, num_b = shape
        return np.full(shape, 1.0 / (num_a * num_b))
    mask = pattern.mask
    return mask / pattern.sizes()[:, None, None]


def expected_cost(inst: ProblemInstance, q) -> float:
    q = np.asarray(q, dtype=float)
    if q.shape != inst.shape:
        raise ShapeMismatch(f"policy shape {q.shape} does not match instance shape {inst.shape}")
    per_state = (inst.cost * q).reshape(inst.num_s, -1).sum(axis=1)
    return float(inst.prior @ per_state)


def marginal_b(inst: ProblemInstance, q, pattern: SupportPattern | None = None) -> np.ndarray:
    """Prior-averaged ``B``-marginal ``t_b = sum_s p_s sum_a q[s, a, b]``."""
    q = np.asarray(q, dtype=float)
    if q.shape != inst.shape:
        raise ShapeMismatch(f"policy shape {q.shape} does not match instance shape {inst.shape}")
    if pattern is not None:
        off = np.abs(q[~pattern.mask])
        if off.size and off.max() > SUPPORT_TOL:
            raise SupportViolation(f"policy puts mass {off.max():.3g} outside the support pattern")
        q = np.where(pattern.mask, q, 0.0)
    return _marginal(inst.prior, q)


def _marginal(prior: np.ndarray, q: np.ndarray) -> np.ndarray:
    # sum over a first, then a fixed-order weighted reduction over s
    return (prior[:, None] * q.sum(axis=1)).sum(axis=0)
