"""Instance constructors."""
import numpy as np
import pytest

from entropic_lp import RandomSpec, extended_instance, ghn_instance, random_instance
from entropic_lp.errors import InvalidConfig, RejectionExhausted


class TestGhn:
    def test_entries(self, ghn):
        np.testing.assert_array_equal(ghn.prior, [0.5, 0.5])
        expected = np.ones((2, 2, 2))
        expected[0, 0, 0] = expected[1, 1, 1] = 0.0
        np.testing.assert_array_equal(ghn.cost, expected)


class TestExtended:
    def test_two_is_ghn(self):
        a, b = extended_instance(2), ghn_instance()
        np.testing.assert_array_equal(a.cost, b.cost)
        np.testing.assert_array_equal(a.prior, b.prior)

    def test_structure(self):
        inst = extended_instance(10)
        assert inst.shape == (10, 10, 10)
        np.testing.assert_allclose(inst.prior, 0.1)
        zeros = np.argwhere(inst.cost == 0)
        np.testing.assert_array_equal(zeros, np.repeat(np.arange(10)[:, None], 3, axis=1))
        assert np.count_nonzero(inst.cost == 1) == 1000 - 10

    @pytest.mark.parametrize("d", [1, 0, -3])
    def test_invalid(self, d):
        with pytest.raises(InvalidConfig):
            extended_instance(d)


class TestRandom:
    def test_deterministic(self):
        spec = RandomSpec((3, 4, 5), seed=7)
        np.testing.assert_array_equal(random_instance(spec).cost, random_instance(spec).cost)

    def test_seeds_differ(self):
        a = random_instance(RandomSpec((3, 4, 5), seed=1)).cost
        b = random_instance(RandomSpec((3, 4, 5), seed=2)).cost
        assert not np.array_equal(a, b)

    @pytest.mark.parametrize("dims, count", [((5, 10, 10), 500), ((20, 40, 40), 32000)])
    def test_decimal_grid(self, dims, count):
        inst = random_instance(RandomSpec(dims, seed=0))
        num_a, num_b, num_s = dims
        assert inst.shape == (num_s, num_a, num_b)
        assert inst.cost.size == count
        scaled = inst.cost * 10
        np.testing.assert_allclose(scaled, np.round(scaled), atol=1e-9)
        assert inst.cost.min() >= 0 and inst.cost.max() <= 10
        np.testing.assert_allclose(inst.prior, 1 / num_s)

    def test_require_not_attainable(self):
        from entropic_lp import normalize_costs, solve_delta0

        inst = random_instance(RandomSpec((2, 2, 2), seed=3, require_not_attainable=True))
        assert not solve_delta0(normalize_costs(inst)[0]).attainable

    def test_rejection_exhausted(self):
        # one b-column leaves no room for a positive constraint value
        with pytest.raises(RejectionExhausted):
            random_instance(RandomSpec((2, 1, 2), seed=0, require_not_attainable=True))

    @pytest.mark.parametrize("kwargs", [
        dict(dims=(2, 2)),
        dict(dims=(0, 2, 2)),
        dict(dims=(2, 2, 2), cost_low=1.0, cost_high=1.0),
        dict(dims=(2, 2, 2), decimals=-1),
    ])
    def test_invalid_spec(self, kwargs):
        with pytest.raises(InvalidConfig):
            RandomSpec(**kwargs)
