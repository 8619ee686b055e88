"""Shared fixtures and independent oracles for the test suite."""

import numpy as np
import pytest

from discgame import PayoutMatrix


RPS_ENTRIES = np.array([[0.0, 1.0, -1.0],
                        [-1.0, 0.0, 1.0],
                        [1.0, -1.0, 0.0]])


@pytest.fixture
def rps():
    return PayoutMatrix(RPS_ENTRIES, labels=["rock", "paper", "scissors"])


def rk4_solve(field, y0, t0, t1, n_steps):
    """Generic fixed-step RK4 oracle, independent of the library paths."""
    y = np.asarray(y0, dtype=float).copy()
    t = t0
    h = (t1 - t0) / n_steps
    for _ in range(n_steps):
        k1 = field(t, y)
        k2 = field(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = field(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = field(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return y


def random_skew(n, rng, scale=1.0):
    m = rng.standard_normal((n, n)) * scale
    return 0.5 * (m - m.T)


def random_weights(n, rng):
    w = rng.uniform(0.2, 1.0, n)
    return w / w.sum()


def weighted_frobenius_sq(entries, weights):
    """Brute-force squared norm Σ_ij w_i w_j F_ij²."""
    return float(np.sum(weights[:, None] * weights[None, :] * entries**2))


def symmetric_cloud(rng, m=10, r=2, scale=1.0):
    """Cloud that spans the plane and is symmetric about the origin."""
    pts = rng.standard_normal((m, r)) * scale
    return np.concatenate([pts, -pts])
