import numpy as np
import pytest

import discgame as dg
from discgame.closedform import (
    fictitious_average,
    laplace_period,
    laplace_population,
)
from discgame.errors import BlowUp, OutOfDomain
from discgame.hamiltonian import LaplaceUnit, ProductMarginals, ReplicatorSystem

from conftest import rk4_solve


def spin_field(t, y):
    """dy/dt = U y for one coordinate pair."""
    return np.array([y[1], -y[0]])


class TestSelfPlay:
    def test_quarter_turn(self):
        assert np.allclose(dg.self_play((1.0, 0.0), np.pi / 2), [0.0, -1.0],
                           atol=1e-15)

    def test_isometry(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            y0 = rng.standard_normal(2)
            t = float(rng.uniform(0, 20))
            assert np.linalg.norm(dg.self_play(y0, t)) == pytest.approx(
                np.linalg.norm(y0), rel=1e-14)

    def test_matches_integration(self):
        y0 = np.array([0.3, -1.1])
        oracle = rk4_solve(spin_field, y0, 0.0, 10.0, 20000)
        assert np.max(np.abs(dg.self_play(y0, 10.0) - oracle)) < 1e-8


class TestFictitiousSelfPlay:
    @staticmethod
    def lag_field(t, state):
        y, avg = state[:2], state[2:]
        return np.concatenate([[avg[1], -avg[0]], (y - avg) / t])

    def oracle(self, t, n_steps=400000):
        t0 = 1e-8
        start = np.concatenate([dg.fictitious_self_play(t0), [0.0, 1.0]])
        return rk4_solve(self.lag_field, start, t0, t, n_steps)

    def test_series_start(self):
        assert np.allclose(dg.fictitious_self_play(1e-12), [0.0, 1.0], atol=1e-6)

    def test_matches_lag_system_at_5(self):
        oracle = self.oracle(5.0)
        y = dg.fictitious_self_play(5.0)
        assert np.max(np.abs(y - oracle[:2])) < 1e-6
        assert np.max(np.abs(fictitious_average(5.0) - oracle[2:])) < 1e-6

    def test_radius_strictly_increasing(self):
        ts = np.linspace(1.0, 100.0, 400)
        radii = [np.linalg.norm(dg.fictitious_self_play(t)) for t in ts]
        assert np.all(np.diff(radii) > 0)

    def test_domain(self):
        with pytest.raises(OutOfDomain):
            dg.fictitious_self_play(0.0)
        with pytest.raises(OutOfDomain):
            dg.fictitious_self_play(101.0)


class TestSgaEpicycles:
    def test_single_agent_is_static(self):
        y = dg.sga_epicycles([[0.7, -0.2]], 13.0)
        assert np.allclose(y, [[0.7, -0.2]], atol=1e-14)

    def test_symmetric_pair_counter_rotates(self):
        ys0 = np.array([[1.0, 0.0], [-1.0, 0.0]])
        t = 2.0
        out = dg.sga_epicycles(ys0, t)
        # centroid stays 0; each agent turns counterclockwise at rate 1/2
        assert np.allclose(out.mean(axis=0), 0.0, atol=1e-14)
        expected0 = np.array([np.cos(t / 2), np.sin(t / 2)])
        assert np.allclose(out[0], expected0, atol=1e-12)

    def test_matches_integration_n5(self):
        rng = np.random.default_rng(2)
        ys0 = rng.standard_normal((5, 2))

        def field(t, flat):
            y = flat.reshape(5, 2)
            avg = y.mean(axis=0)
            v = avg[None, :] - y / 5.0
            return np.column_stack([v[:, 1], -v[:, 0]]).ravel()

        oracle = rk4_solve(field, ys0.ravel(), 0.0, 10.0, 100000).reshape(5, 2)
        assert np.max(np.abs(dg.sga_epicycles(ys0, 10.0) - oracle)) < 1e-7


class TestTransitiveDensity:
    def test_equal_ratings_frozen(self):
        w = dg.transitive_density([2.0, 2.0, 2.0], [0.2, 0.3, 0.5], 1.0, 7.0)
        assert np.allclose(w, [0.2, 0.3, 0.5], atol=1e-15)

    def test_two_type_ratio(self):
        w = dg.transitive_density([1.0, 0.0], [0.5, 0.5], 1.0, 1.0)
        # oracle: the 2-type replicator ODE has ratio e^{t P Δr} = e
        assert w[0] / w[1] == pytest.approx(np.e, rel=1e-12)

    def test_matches_direct_replicator(self):
        ratings = np.array([0.5, 0.1, -0.2, -0.4])
        pm = dg.make_transitive(ratings)
        w0 = np.array([0.4, 0.3, 0.2, 0.1])
        traj = dg.direct_replicator(pm, w0, dt=1e-3, t_max=3.0, record_every=3000)
        closed = dg.transitive_density(ratings, w0, 1.0, 3.0)
        assert np.max(np.abs(traj.weights[-1] - closed)) < 1e-8


class TestGaussianQuadratic:
    def test_one_dim_covariance_contraction(self):
        # with unit start and rating curvature −1 the covariance is 1/(1+t)
        for t in (0.5, 1.0, 4.0):
            _, sigma = dg.gaussian_quadratic([0.0], [[1.0]], [0.0], [[-1.0]],
                                             [[0.0]], t)
            assert sigma[0, 0] == pytest.approx(1.0 / (1.0 + t), rel=1e-12)

    def test_zero_curvature_is_frozen_covariance(self):
        sigma0 = np.array([[2.0, 0.3], [0.3, 1.0]])
        _, sigma = dg.gaussian_quadratic([0.1, -0.2], sigma0, [0.0, 0.0],
                                         np.zeros((2, 2)),
                                         [[0.0, 1.0], [-1.0, 0.0]], 5.0)
        assert np.max(np.abs(sigma - sigma0)) < 1e-12

    def test_blowup(self):
        with pytest.raises(BlowUp):
            dg.gaussian_quadratic([0.0], [[1.0]], [0.0], [[1.0]], [[0.0]], 1.0)

    def test_matches_moment_integration(self):
        # oracle: RK4 on the coupled moment system (means and covariances)
        rng = np.random.default_rng(3)
        d = 2
        a = rng.standard_normal((d, d))
        h = -(a @ a.T)  # negative definite: solution global
        c = np.array([[0.0, 0.7], [-0.7, 0.0]])
        g = rng.standard_normal(d)
        x0 = rng.standard_normal(d)
        s0 = np.eye(d) * 0.8

        def field(t, state):
            x = state[:d]
            s = state[d:].reshape(d, d)
            dx = s @ (g + (h + c) @ x)
            ds = s @ h @ s
            return np.concatenate([dx, ds.ravel()])

        oracle = rk4_solve(field, np.concatenate([x0, s0.ravel()]), 0.0, 2.0,
                           20000)
        xbar, sigma = dg.gaussian_quadratic(x0, s0, g, h, c, 2.0, n_steps=20000)
        assert np.max(np.abs(xbar - oracle[:d])) < 1e-9
        assert np.max(np.abs(sigma - oracle[d:].reshape(d, d))) < 1e-9


class TestLaplaceOscillator:
    def test_start_on_axis(self):
        a = 0.37
        theta = dg.laplace_oscillator(a, laplace_population(a), 0.0)
        assert np.allclose(theta, [0.0, a], atol=1e-15)

    def test_matches_constant_rate_integration(self):
        a = 0.6
        total = laplace_population(a)
        period = laplace_period(a)
        sys_ = ReplicatorSystem(ProductMarginals([LaplaceUnit(), LaplaceUnit()]),
                                rate_mode="constant")
        traj = dg.integrate(sys_, [0.0, a], period, period / 20000,
                            record_every=100)
        closed = np.array([dg.laplace_oscillator(a, total, t)
                           for t in traj.times])
        assert np.max(np.abs(traj.thetas - closed)) < 1e-6

    def test_period_small_amplitude(self):
        # T(a) = 2 (1 − a²) K(a²) → π
        assert laplace_period(1e-4) == pytest.approx(np.pi, rel=1e-7)

    def test_domain(self):
        with pytest.raises(OutOfDomain):
            dg.laplace_oscillator(1.0, 1.0, 0.5)
