"""Shared random generators for the tests."""
import numpy as np
from hypothesis import strategies as st

from entropic_lp import ProblemInstance


def random_policy(rng, shape, sparsity=0.0):
    """Per-state normalized random policy; ``sparsity`` zeroes a fraction of entries."""
    q = rng.random(shape)
    if sparsity:
        q[rng.random(shape) < sparsity] = 0.0
        flat = q.reshape(shape[0], -1)
        empty = flat.sum(axis=1) == 0
        flat[empty, 0] = 1.0
    return q / q.sum(axis=(1, 2), keepdims=True)


def random_costs(rng, shape, scale=10.0):
    return np.floor(rng.random(shape) * (10 * scale + 1)) / 10


def random_prior(rng, n):
    p = rng.random(n) + 0.1
    return p / p.sum()


@st.composite
def instances(draw, max_dim=4, min_a=2):
    s = draw(st.integers(1, max_dim))
    a = draw(st.integers(min_a, max_dim))
    b = draw(st.integers(1, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return ProblemInstance(random_prior(rng, s), random_costs(rng, (s, a, b)))
