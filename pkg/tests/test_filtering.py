import math

import numpy as np
import pytest

import reinsure_lab as rl
from oracles import rk4_filter_ode

LAM = np.array([2.0, 4.0, 5.0])
PI = np.array([0.4, 0.4, 0.2])
PRIOR = rl.IntensityPrior(LAM, PI)
DIR = rl.DirichletPrior(np.array([8.0, 7.0, 5.0]))


def state(t=0.0, p=PI, q=(0, 0, 0)):
    return rl.FilterState(t, np.asarray(p, dtype=float), np.asarray(q))


class TestPropagate:
    def test_degenerate_prior_is_fixed_point(self):
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1.0
            out = rl.propagate(state(p=e), 1.7, PRIOR)
            np.testing.assert_allclose(out.p, e, atol=1e-15)

    def test_two_state_hand_value(self):
        prior = rl.IntensityPrior(np.array([1.0, 2.0]), np.array([0.5, 0.5]))
        st = rl.FilterState(0.0, np.array([0.5, 0.5]), np.zeros(1, dtype=int))
        out = rl.propagate(st, math.log(2.0), prior)
        np.testing.assert_allclose(out.p, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)

    def test_matches_rk4_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            p0 = rng.dirichlet(np.ones(3))
            dt = rng.uniform(0.0, 2.0)
            closed = rl.propagate(state(p=p0), dt, PRIOR).p
            oracle = rk4_filter_ode(p0, LAM, dt, max(1, int(dt / 1e-4)))
            np.testing.assert_allclose(closed, oracle, atol=1e-9)

    def test_derivative_matches_ode_field(self):
        # d/dt phi_j = phi_j (sum_k lambda_k phi_k - lambda_j), checked by
        # centered differences of the closed form
        rng = np.random.default_rng(8)
        for _ in range(20):
            p0 = rng.dirichlet(np.ones(3))
            dt = rng.uniform(0.1, 1.5)
            h = 1e-6
            plus = rl.propagate(state(p=p0), dt + h, PRIOR).p
            minus = rl.propagate(state(p=p0), dt - h, PRIOR).p
            fd = (plus - minus) / (2 * h)
            phi = rl.propagate(state(p=p0), dt, PRIOR).p
            field = phi * (LAM @ phi - LAM)
            np.testing.assert_allclose(fd, field, atol=1e-6)

    def test_time_advances_q_frozen(self):
        out = rl.propagate(state(q=(1, 2, 3)), 0.5, PRIOR)
        assert out.t == 0.5
        np.testing.assert_array_equal(out.q, [1, 2, 3])

    def test_large_dt_no_underflow(self):
        out = rl.propagate(state(), 500.0, PRIOR)
        assert abs(out.p.sum() - 1.0) < 1e-12
        assert out.p[0] == pytest.approx(1.0, abs=1e-12)  # smallest intensity wins

    def test_rejects_negative_dt(self):
        with pytest.raises(ValueError):
            rl.propagate(state(), -0.1, PRIOR)

    def test_order_preservation(self):
        # no-event evidence favours smaller intensities: p_j/p_k nondecreasing
        # in dt whenever lambda_j < lambda_k
        dts = np.linspace(0.0, 3.0, 31)
        ratios = []
        for dt in dts:
            p = rl.propagate(state(), dt, PRIOR).p
            ratios.append(p[0] / p[2])
        assert np.all(np.diff(ratios) > 0)


class TestJumpUpdate:
    def test_reference_value(self):
        out = rl.jump_update(state(p=(0.4, 0.4, 0.2)), rl.LineSet(1), PRIOR)
        np.testing.assert_allclose(out.p, np.array([0.8, 1.6, 1.0]) / 3.4, atol=1e-12)

    def test_degenerate_fixed_point(self):
        e = np.array([0.0, 1.0, 0.0])
        out = rl.jump_update(state(p=e), rl.LineSet(2), PRIOR)
        np.testing.assert_allclose(out.p, e, atol=1e-15)

    def test_count_increment(self):
        out = rl.jump_update(state(), rl.LineSet(3), PRIOR)
        np.testing.assert_array_equal(out.q, [0, 0, 1])
        out2 = rl.jump_update(out, rl.LineSet(1), PRIOR)
        np.testing.assert_array_equal(out2.q, [1, 0, 1])

    def test_time_unchanged(self):
        out = rl.jump_update(state(t=2.5), rl.LineSet(1), PRIOR)
        assert out.t == 2.5

    def test_rejects_subset_outside_count_vector(self):
        with pytest.raises(ValueError):
            rl.jump_update(state(), rl.LineSet(8), PRIOR)


class TestLambdaHat:
    def test_prior_mean(self):
        assert rl.lambda_hat(state(), PRIOR) == pytest.approx(3.4, rel=1e-14)

    def test_degenerate(self):
        e = np.array([0.0, 0.0, 1.0])
        assert rl.lambda_hat(state(p=e), PRIOR) == pytest.approx(5.0, rel=1e-15)

    def test_bounded_by_extremes_along_any_history(self):
        rng = np.random.default_rng(12)
        st = state()
        for _ in range(200):
            if rng.random() < 0.5:
                st = rl.propagate(st, rng.uniform(0, 0.3), PRIOR)
            else:
                st = rl.jump_update(st, rl.LineSet(int(rng.integers(1, 4))), PRIOR)
            lam = rl.lambda_hat(st, PRIOR)
            assert LAM[0] - 1e-12 <= lam <= LAM[-1] + 1e-12


class TestThinningPosteriorMean:
    def test_prior_mean(self):
        np.testing.assert_allclose(rl.thinning_posterior_mean(state(), DIR), [0.40, 0.35, 0.25], atol=1e-15)

    def test_single_count(self):
        st = state(q=(0, 0, 1))
        np.testing.assert_allclose(rl.thinning_posterior_mean(st, DIR),
                                   np.array([8.0, 7.0, 6.0]) / 21.0, atol=1e-15)

    def test_zero_counts_any_beta(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            beta = rng.uniform(0.1, 9.0, size=3)
            d = rl.DirichletPrior(beta)
            np.testing.assert_allclose(rl.thinning_posterior_mean(state(), d), beta / beta.sum(), atol=1e-15)


class TestInvariants:
    def test_simplex_preserved_under_interleaving(self):
        rng = np.random.default_rng(42)
        st = state()
        events = 0
        for _ in range(500):
            if rng.random() < 0.6:
                st = rl.propagate(st, rng.exponential(0.2), PRIOR)
            else:
                st = rl.jump_update(st, rl.LineSet(int(rng.integers(1, 4))), PRIOR)
                events += 1
            assert abs(st.p.sum() - 1.0) <= 1e-10
            assert np.all(st.p >= 0)
        assert st.q.sum() == events  # count conservation

    def test_state_is_immutable(self):
        st = state()
        with pytest.raises(ValueError):
            st.p[0] = 0.9
