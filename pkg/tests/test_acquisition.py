"""Hybrid acquisition: EI/UCB terms, weight schedule, penalty, arg-max."""

import numpy as np
import pytest
from benchmarks import toy_problem
from hypothesis import given
from hypothesis import strategies as st

from splitedge import gp
from splitedge.acquisition import (AcquisitionWeights, _select, candidate_grid,
                                   constraint_penalty, expected_improvement, hybrid_score,
                                   incumbent_value, maximize, normalized_time, schedule_weights,
                                   upper_confidence_bound)
from splitedge.gp import GpHyperparams
from splitedge.system_model import Budget, CostBreakdown, SplitConfig

X3 = np.array([[0.1, 0.1], [0.8, 0.4], [0.3, 0.9]])
Y3 = np.array([0.5, 0.9, 0.2])


def model3():
    return gp._build(X3, Y3, GpHyperparams(0.3, 0.5))


class TestExpectedImprovement:
    @pytest.mark.parametrize("mean, std, best", [(0.5, 0.2, 0.6), (0.9, 0.05, 0.6),
                                                 (0.0, 1.0, 0.0), (-1.0, 0.3, 0.2)])
    def test_monte_carlo(self, mean, std, best):
        rng = np.random.Generator(np.random.PCG64(7))
        samples = rng.normal(mean, std, 1_000_000)
        mc = np.maximum(samples - best, 0.0).mean()
        assert expected_improvement(mean, std, best) == pytest.approx(mc, abs=1e-3)

    def test_zero_std_is_hinge(self):
        assert expected_improvement(0.8, 0.0, 0.5) == pytest.approx(0.3)
        assert expected_improvement(0.4, 0.0, 0.5) == 0.0

    def test_vectorized(self):
        out = expected_improvement(np.array([0.1, 0.7]), np.array([0.0, 0.1]), 0.5)
        assert out.shape == (2,) and out[0] == 0.0

    @given(st.floats(-2, 2), st.floats(0, 2), st.floats(-2, 2))
    def test_nonnegative_and_above_hinge(self, mean, std, best):
        ei = expected_improvement(mean, std, best)
        assert ei >= 0.0 and ei >= mean - best - 1e-12


def test_ucb():
    assert upper_confidence_bound(0.5, 0.1, 2.0) == pytest.approx(0.7)


class TestSchedule:
    def test_geometric_midpoint(self):
        w = AcquisitionWeights(base_start=1.0, base_end=0.01, grad_start=0.5, grad_end=0.05)
        # T=21, N0=5: n=15 gives t = 10/20 = 0.5
        assert normalized_time(15, 21, 5) == 0.5
        base, grad = schedule_weights(w, 15, 21, 5)
        assert base == pytest.approx(0.1)
        assert grad == pytest.approx(0.5 * 0.1 ** 0.5)

    def test_endpoints_and_clamp(self):
        w = AcquisitionWeights()
        assert schedule_weights(w, 5, 20, 5) == (w.base_start, w.grad_start)
        assert schedule_weights(w, 500, 20, 5)[0] == pytest.approx(w.base_end)

    def test_zero_start_stays_zero(self):
        w = AcquisitionWeights(grad_start=0.0, grad_end=0.0)
        assert schedule_weights(w, 10, 20, 5)[1] == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            AcquisitionWeights(base_start=0.1, base_end=1.0)
        with pytest.raises(ValueError):
            AcquisitionWeights(penalty=-1.0)
        with pytest.raises(ValueError):
            normalized_time(3, 1, 1)


class TestHybridScore:
    def test_all_weights_zero(self):
        w = AcquisitionWeights(0, 0, 0, 0, 0, 0)
        Q = np.random.Generator(np.random.PCG64(0)).uniform(0, 1, (20, 2))
        np.testing.assert_array_equal(hybrid_score(Q, model3(), w, 0.3, np.ones(20), 0.9), 0.0)

    def test_terms_recombine(self):
        """Score equals the hand sum of independently computed terms."""
        w = AcquisitionWeights(ucb_beta=1.5)
        model = model3()
        Q = np.array([[0.2, 0.2], [0.6, 0.5], [0.95, 0.05]])
        pen = np.array([0.0, 0.2, 1.5])
        t = 0.4
        score = hybrid_score(Q, model, w, t, pen, 0.9)
        mean, var = gp.posterior(model, Q)
        std = np.sqrt(var)
        ei = expected_improvement(mean, std, 0.9)
        grad = np.linalg.norm(gp.posterior_mean_grad(model, Q), axis=1)
        lb = 1.0 * 0.1 ** t
        lg = 0.05 * 0.1 ** t
        want = lb * ei + lb * (mean + 1.5 * std) - lg * grad - 10.0 * pen
        np.testing.assert_allclose(score, want, rtol=1e-12)

    def test_components_returned(self):
        score, parts = hybrid_score(np.array([0.5, 0.5]), model3(), AcquisitionWeights(), 0.0,
                                    0.0, 0.9, components=True)
        assert isinstance(score, float)
        assert set(parts) >= {"ei", "ucb", "grad_norm", "penalty"}

    def test_penalty_dominates_gp_terms(self):
        """A 0.1 J/s violation outweighs any attainable GP advantage."""
        model = model3()
        Q = np.array([[0.8, 0.4], [0.3, 0.9]])  # best and worst observed points
        s = hybrid_score(Q, model, AcquisitionWeights(), 0.0, np.array([0.1, 0.0]), 0.9)
        assert s[1] > s[0]

    def test_mean_hinge_form(self):
        model = model3()
        x = np.array([0.8, 0.4])
        w = AcquisitionWeights(grad_start=0, grad_end=0, ucb_beta=0)
        s = hybrid_score(x, model, w, 0.0, 0.0, 0.5, ei_form="mean_hinge")
        mean = gp.posterior(model, x)[0]
        assert s == pytest.approx(max(mean - 0.5, 0) + mean)
        with pytest.raises(ValueError):
            hybrid_score(x, model, w, 0.0, 0.0, 0.5, ei_form="other")


def test_constraint_penalty_hinges():
    c = CostBreakdown(5.5, 0.0, 4.0, 0.0, 0.0, False)
    assert constraint_penalty(c, Budget(5.0, 5.0)) == pytest.approx(0.5)
    ok = CostBreakdown(1.0, 0.0, 1.0, 0.0, 0.0, True)
    assert constraint_penalty(ok, Budget(5.0, 5.0)) == 0.0


def test_incumbent_prefers_feasible():
    assert incumbent_value([0.9, 0.4, 0.6], [False, True, True]) == 0.6
    assert incumbent_value([0.9, 0.4], [False, False]) == 0.9


class TestSelection:
    def test_tie_break_penalty_then_layer_then_power(self):
        scores = np.array([1.0, 1.0, 1.0, 1.0, 0.5])
        penalty = np.array([0.1, 0.0, 0.0, 0.0, 0.0])
        layers = np.array([1, 3, 2, 2, 1])
        powers = np.array([0.1, 0.1, 0.4, 0.2, 0.1])
        assert _select(scores, penalty, layers, powers) == 3

    def test_candidate_grid_layout(self):
        prob = toy_problem([0.5, 0.6, 0.7])
        X, layers, powers = candidate_grid(prob, power_levels=4)
        assert X.shape == (12, 2)
        np.testing.assert_array_equal(layers, np.repeat([1, 2, 3], 4))
        np.testing.assert_allclose(X[:4, 0], [0, 1 / 3, 2 / 3, 1])
        np.testing.assert_allclose(np.unique(X[:, 1]), [0, 0.5, 1])

    def test_single_feasible_candidate_wins(self):
        # layer 1 payload is hopeless; layer 2 fits the delay budget only at 0.5 W
        prob = toy_problem([0.9, 0.5], bits=(1e10, 1e8))
        grid = (0.1, 0.5)
        feas = [(l, p) for l in (1, 2) for p in grid if prob.cost(SplitConfig(l, p)).feasible]
        assert feas == [(2, 0.5)]
        # the GP strongly prefers layer 1
        model = gp._build(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                          np.array([0.9, 0.9, 0.01]), GpHyperparams(0.5, 1.0))
        x = maximize(model, AcquisitionWeights(), 0.0, prob, 0.01, powers_w=grid, refine=False)
        assert prob.to_config(x) == SplitConfig(2, 0.5)

    def test_refine_stays_on_layer_and_between_neighbours(self):
        prob = toy_problem([0.5, 0.7, 0.9, 0.6])
        model = gp._build(np.array([[0.2, 0.0], [0.45, 0.66], [0.9, 1.0]]),
                          np.array([0.5, 0.9, 0.6]), GpHyperparams(0.3, 0.5))
        coarse = maximize(model, AcquisitionWeights(), 0.5, prob, 0.9, power_levels=8,
                          refine=False)
        fine = maximize(model, AcquisitionWeights(), 0.5, prob, 0.9, power_levels=8)
        assert fine[1] == coarse[1]
        assert abs(fine[0] - coarse[0]) <= 1 / 7 + 1e-12

    def test_deterministic(self):
        prob = toy_problem([0.5, 0.7, 0.9, 0.6])
        a = maximize(model3(), AcquisitionWeights(), 0.2, prob, 0.9)
        b = maximize(model3(), AcquisitionWeights(), 0.2, prob, 0.9)
        np.testing.assert_array_equal(a, b)
