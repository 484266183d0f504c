"""Minimal-cost supports and the attainability decision."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_lp import (
    ProblemInstance,
    SupportPattern,
    attainability_value,
    extended_instance,
    minimal_supports,
    normalize_costs,
    solve_delta0,
)
from entropic_lp.errors import DegenerateCosts, NotAttainable


class TestMinimalSupports:
    def test_ghn(self, ghn):
        pattern = minimal_supports(ghn)
        assert pattern.pairs(0) == [(0, 0)]
        assert pattern.pairs(1) == [(1, 1)]

    def test_constant_state_is_full(self):
        cost = np.array([[[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [2.0, 3.0]]])
        pattern = minimal_supports(ProblemInstance([0.5, 0.5], cost))
        assert pattern.pairs(0) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert pattern.pairs(1) == [(0, 1)]

    def test_ties_kept(self):
        cost = np.array([[[0.0, 2.0], [1.0, 0.0]]])
        assert minimal_supports(ProblemInstance([1.0], cost)).pairs(0) == [(0, 0), (1, 1)]

    def test_near_ties_from_float_input(self):
        cost = np.array([[[0.1 + 0.2, 0.3], [1.0, 2.0]]])
        assert minimal_supports(ProblemInstance([1.0], cost)).pairs(0) == [(0, 0), (0, 1)]


class TestSolveDelta0:
    def test_ghn_not_attainable(self, ghn):
        report = solve_delta0(ghn)
        assert not report.attainable
        assert report.g_at_limit == pytest.approx(math.log(2), abs=1e-12)

    @pytest.mark.parametrize("d", [2, 5, 10, 18])
    def test_extended(self, d):
        report = solve_delta0(extended_instance(d))
        assert not report.attainable
        assert report.g_at_limit == pytest.approx(math.log(d), abs=1e-10)

    def test_zero_cost_state_structure_attainable(self):
        # every state has a zero-cost column at b = 0, so a can be randomized freely
        cost = np.ones((2, 3, 2))
        cost[:, :, 0] = 0.0
        report = solve_delta0(ProblemInstance([0.5, 0.5], cost))
        assert report.attainable
        assert report.g_at_limit == pytest.approx(-math.log(3), abs=1e-12)

    def test_iterates_stay_on_face(self, rng):
        cost = np.floor(rng.random((3, 3, 3)) * 3)
        inst = ProblemInstance(np.full(3, 1 / 3), cost)
        report = solve_delta0(inst)
        assert np.all(report.policy[~report.pattern.mask] == 0)

    def test_g_nonincreasing_along_run(self, rng):
        cost = np.floor(rng.random((4, 3, 3)) * 2)
        report = solve_delta0(ProblemInstance(np.full(4, 0.25), cost))
        gs = [r.g_val for r in report.outcome.trace]
        assert np.all(np.diff(gs) <= 1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_injective_singletons_give_log_states(self, n):
        # state s costs 0 only at (a=0, b=s): singleton supports, distinct b per state
        cost = np.ones((n, 2, n))
        cost[np.arange(n), 0, np.arange(n)] = 0.0
        report = solve_delta0(ProblemInstance(np.full(n, 1 / n), cost))
        assert report.g_at_limit == pytest.approx(math.log(n), abs=1e-12)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_support_growth_never_increases_g(self, seed):
        rng = np.random.default_rng(seed)
        cost = np.floor(rng.random((2, 2, 2)) * 4)
        inst = ProblemInstance([0.5, 0.5], cost)
        try:
            normalize_costs(inst)
        except DegenerateCosts:
            return
        s = rng.integers(2)
        grown = cost.copy()
        a, b = rng.integers(2), rng.integers(2)
        grown[s, a, b] = cost[s].min()
        g_before = solve_delta0(inst).g_at_limit
        g_after = solve_delta0(ProblemInstance([0.5, 0.5], grown)).g_at_limit
        assert g_after <= g_before + 1e-9


class TestAttainabilityValue:
    def test_attainable_returns_cmin(self):
        cost = np.ones((2, 2, 2)) * 3
        cost[:, :, 1] = 1.0
        inst = ProblemInstance([0.5, 0.5], cost)
        work, offsets = normalize_costs(inst)
        report = solve_delta0(work)
        assert attainability_value(work, report, offsets) == pytest.approx(1.0, abs=1e-15)

    def test_ghn_raises(self, ghn):
        with pytest.raises(NotAttainable):
            attainability_value(ghn, solve_delta0(ghn))

    def test_constant_costs(self):
        inst = ProblemInstance([0.5, 0.5], np.full((2, 2, 3), 4.0))
        report = solve_delta0(inst)
        assert report.attainable
        assert report.pattern == SupportPattern.full(inst.shape)
        assert attainability_value(inst, report) == 4.0
