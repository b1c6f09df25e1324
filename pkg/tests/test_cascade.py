import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_system
from contagion.cascade import FailureParams, ShockScenario, apply_shock, failure_thresholds, run_cascade
from contagion.errors import DimensionMismatch, InputError
from contagion.model import (
    FractionMatrix,
    InterdependencyMatrix,
    PortfolioMatrix,
    capital_ratios,
    equity_values,
    interdependency,
)
from oracles import least_fixed_point


def make_system(rng, n, m=4):
    c, d, l_ext = random_system(rng, n, m=m)
    f = FractionMatrix(c)
    a = interdependency(f, capital_ratios(f, l_ext))
    port = PortfolioMatrix(d)
    return a, port, equity_values(a, port)


class TestThresholds:
    def test_pair(self):
        np.testing.assert_allclose(failure_thresholds([100, 50], 0.971), [97.1, 48.55], rtol=1e-15)

    def test_theta_one(self):
        np.testing.assert_array_equal(failure_thresholds([3.0, 7.0], 1.0), [3.0, 7.0])

    def test_single(self):
        np.testing.assert_allclose(failure_thresholds([200], 0.973), [194.6], rtol=1e-15)

    def test_params_validation(self):
        with pytest.raises(InputError):
            FailureParams(0.0, 0.3, [1.0])
        with pytest.raises(InputError):
            FailureParams(0.9, 1.5, [1.0])
        with pytest.raises(InputError):
            FailureParams(0.9, 0.3, [0.0, 1.0])
        with pytest.raises(DimensionMismatch):
            FailureParams(0.9, [0.3, 0.3, 0.3], [1.0, 1.0])

    def test_costs(self):
        p = FailureParams(0.5, 0.8, [10.0, 4.0])
        np.testing.assert_allclose(p.costs, [4.0, 1.6])


class TestApplyShock:
    def test_unit(self):
        port = PortfolioMatrix([[1.0, 2.0], [3.0, 4.0]], [1.5, 2.0])
        out = apply_shock(port, ShockScenario.unit(2))
        np.testing.assert_array_equal(out.values, port.values)
        np.testing.assert_array_equal(out.d, port.d)

    def test_wipe_out_class(self):
        port = PortfolioMatrix([[1.0, 2.0], [3.0, 4.0]], [1.5, 2.0])
        out = apply_shock(port, ShockScenario([1.0, 0.0]))
        np.testing.assert_allclose(out.values, port.values - port.d[:, 1] * 2.0)

    def test_uniform(self, rng):
        port = PortfolioMatrix(rng.uniform(0, 5, (4, 3)))
        out = apply_shock(port, ShockScenario(np.full(3, 0.9)))
        np.testing.assert_allclose(out.values, 0.9 * port.values, rtol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            apply_shock(PortfolioMatrix(np.ones((2, 3))), ShockScenario([1.0, 1.0]))

    def test_negative_factor(self):
        with pytest.raises(InputError):
            ShockScenario([1.0, -0.1])


class TestRunCascade:
    def test_unshocked_no_failures(self, rng):
        a, port, v0 = make_system(rng, 6)
        res = run_cascade(a, port, ShockScenario.unit(port.m), FailureParams(0.97, 0.8, v0))
        assert res.rounds == (frozenset(),)
        assert res.terminated_at == 1
        assert res.hierarchy == []
        np.testing.assert_allclose(res.equity_trace[0], v0, rtol=1e-14)

    def test_two_level_hand_example(self):
        # bank 0 loses its whole portfolio; its failure cost then drags bank 1 under
        a = InterdependencyMatrix([[0.5, 0.0], [0.4, 0.5]])
        port = PortfolioMatrix([[10.0, 0.0], [0.0, 10.0]])
        v0 = np.array([5.0, 9.0])
        shock = ShockScenario([0.5, 1.0])
        res = run_cascade(a, port, shock, FailureParams(0.9, 1.0, v0))
        # round 1: v = (2.5, 2 + 5 = 7) < (4.5, 8.1) -> both fail immediately
        assert res.rounds[0] == frozenset({0, 1})
        res = run_cascade(a, port, shock, FailureParams(0.9, 1.0, np.array([5.0, 7.5])))
        # thresholds (4.5, 6.75): round 1 only bank 0; cost 4.5 cuts bank 1 by 0.4*4.5 = 1.8
        assert res.rounds == (frozenset({0}), frozenset({0, 1}), frozenset({0, 1}))
        assert res.hierarchy == [[0], [1]]
        np.testing.assert_allclose(res.equity_trace[1], [0.5 * (5 - 4.5), 0.4 * 0.5 + 5.0])
        assert res.named_hierarchy(["X", "Y"]) == [["X"], ["Y"]]

    def test_exact_threshold_survives(self):
        a = InterdependencyMatrix([[0.5]])
        port = PortfolioMatrix([[8.0]])
        # equity 4.0 exactly equals theta * v0 = 0.5 * 8
        res = run_cascade(a, port, ShockScenario([1.0]), FailureParams(0.5, 0.3, [8.0]))
        assert res.failed == frozenset()
        res = run_cascade(a, port, ShockScenario([1.0 - 1e-12]), FailureParams(0.5, 0.3, [8.0]))
        assert res.failed == frozenset({0})

    def test_dimension_mismatch(self, rng):
        a, port, v0 = make_system(rng, 3)
        with pytest.raises(DimensionMismatch):
            run_cascade(a, port, ShockScenario.unit(port.m), FailureParams(0.9, 0.3, np.ones(4)))

    def test_threshold_override(self, rng):
        a, port, v0 = make_system(rng, 4)
        big = v0 * 2
        res = run_cascade(a, port, ShockScenario.unit(port.m), FailureParams(0.5, 0.0, v0, thresholds=big))
        assert res.failed == frozenset(range(4))

    def test_three_bank_grid_matches_fixed_point_oracle(self, rng):
        checked = 0
        levels = set()
        for _ in range(40):
            a, port, v0 = make_system(rng, 3)
            factors = rng.uniform(0.85, 1.0, port.m)
            shock = ShockScenario(factors)
            dp = apply_shock(port, shock).values
            for theta, beta in itertools.product((0.9, 0.95, 0.97, 0.99), (0.0, 0.3, 0.8, 1.0)):
                params = FailureParams(theta, beta, v0)
                res = run_cascade(a, port, shock, params)
                assert res.failed == least_fixed_point(a.a, dp, params.vbar, params.costs)
                levels.add(len(res.hierarchy))
                checked += 1
        assert checked == 640
        # the grid exercises empty, single- and multi-level outcomes
        assert {0, 1, 2} <= levels


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_invariants_and_monotonicity(seed, n):
    rng = np.random.default_rng(seed)
    a, port, v0 = make_system(rng, n)
    shock = ShockScenario(rng.uniform(0.8, 1.0, port.m))
    finals = {}
    for theta in (0.95, 0.97, 0.99):
        for beta in (0.3, 0.8):
            res = run_cascade(a, port, shock, FailureParams(theta, beta, v0))
            assert res.terminated_at <= n + 1
            assert res.rounds[-1] == res.rounds[-2] if res.terminated_at > 1 else res.rounds == (frozenset(),)
            for prev, cur in zip(res.rounds, res.rounds[1:]):
                assert prev <= cur
            finals[theta, beta] = res.failed
    for theta in (0.95, 0.97, 0.99):
        assert finals[theta, 0.3] <= finals[theta, 0.8]
    for beta in (0.3, 0.8):
        assert finals[0.95, beta] <= finals[0.97, beta] <= finals[0.99, beta]
