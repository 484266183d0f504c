"""Instance constructors: the 2x2x2 coordination game, its d-dimensional
extension, and seeded random cost tensors on a decimal grid.

Random draws use numpy's Philox counter-based generator keyed by the seed, so
``random_instance(RandomSpec(dims, seed=k))`` is reproducible across
platforms.  A grid value is ``low + floor(u * levels) / 10**decimals``, clipped
to ``high``, where ``levels = (high - low) * 10**decimals + 1``; for the
defaults this is ``floor(101 u) / 10`` on ``[0, 10]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ProblemInstance
from .errors import DegenerateCosts, InvalidConfig, RejectionExhausted

MAX_REJECTIONS = 1000


def ghn_instance() -> ProblemInstance:
    """Two states, two actions each; cost 0 only on the matching diagonal cell."""
    cost = np.ones((2, 2, 2))
    cost[0, 0, 0] = 0.0
    cost[1, 1, 1] = 0.0
    return ProblemInstance(np.array([0.5, 0.5]), cost)


def extended_instance(d: int) -> ProblemInstance:
    if d < 2:
        raise InvalidConfig(f"dimension must be at least 2, got {d}")
    cost = np.ones((d, d, d))
    idx = np.arange(d)
    cost[idx, idx, idx] = 0.0
    return ProblemInstance(np.full(d, 1.0 / d), cost)


@dataclass(frozen=True)
class RandomSpec:
    """Recipe for a random instance.

    ``dims`` is ``(|A|, |B|, |S|)``; the generated cost tensor has shape
    ``(|S|, |A|, |B|)`` and the prior is uniform.
    """

    dims: tuple[int, int, int]
    cost_low: float = 0.0
    cost_high: float = 10.0
    decimals: int = 1
    seed: int = 0
    require_not_attainable: bool = False

    def __post_init__(self):
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise InvalidConfig(f"dims must be three positive integers, got {self.dims}")
        if not self.cost_low < self.cost_high:
            raise InvalidConfig("cost_low must be below cost_high")
        if self.decimals < 0:
            raise InvalidConfig("decimals must be nonnegative")


def _draw(rng: np.random.Generator, spec: RandomSpec) -> ProblemInstance:
    num_a, num_b, num_s = spec.dims
    unit = 10.0 ** spec.decimals
    levels = int(round((spec.cost_high - spec.cost_low) * unit)) + 1
    u = rng.random((num_s, num_a, num_b))
    steps = np.minimum(np.floor(u * levels), levels - 1)
    cost = np.minimum(spec.cost_low + steps / unit, spec.cost_high)
    return ProblemInstance(np.full(num_s, 1.0 / num_s), cost)


def random_instance(spec: RandomSpec) -> ProblemInstance:
    """Draw a cost tensor; optionally resample until the constraint is active."""
    rng = np.random.Generator(np.random.Philox(spec.seed))
    if not spec.require_not_attainable:
        return _draw(rng, spec)

    from .attain import solve_delta0
    from .core import normalize_costs

    for _ in range(MAX_REJECTIONS):
        inst = _draw(rng, spec)
        try:
            work, _ = normalize_costs(inst)
        except DegenerateCosts:
            continue
        if not solve_delta0(work).attainable:
            return inst
    raise RejectionExhausted(f"no non-attainable instance in {MAX_REJECTIONS} draws for {spec}")
