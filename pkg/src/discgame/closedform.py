"""Closed-form solutions of the canonical latent-space learning dynamics.

Each function here solves a specific ODE exactly; the matching generic
integration lives in the test suite and treats these formulas as claims to
be verified, never the other way around.
"""

import numpy as np

from .errors import BlowUp, NotSkew, NotSymmetric, OutOfDomain
from .special import kelvin_ber0_bei0

FICTITIOUS_T_MAX = 100.0


def self_play(y0, t: float) -> np.ndarray:
    """Training against oneself in one latent plane: clockwise circles.

    Solves dy/dt = U y.  The norm is preserved and the phase advances
    clockwise at unit rate, so ``y(t) = ‖y0‖ (cos(t − s), −sin(t − s))``
    with s the initial phase.
    """
    y0 = np.asarray(y0, dtype=float)
    radius = float(np.hypot(y0[0], y0[1]))
    s = float(np.arctan2(y0[1], y0[0]))
    return radius * np.array([np.cos(t - s), -np.sin(t - s)])


def fictitious_self_play(t: float) -> np.ndarray:
    """Training against one's entire past, canonical start (0, 1).

    Solves the lag system dy/dt = U ȳ, dȳ/dt = (y − ȳ)/t with ȳ(0) = y(0).
    The power-series solution from y(0) = (0, 1) closes into Kelvin
    functions of order zero:

        y1(t) = bei(2 sqrt(t)),   y2(t) = ber(2 sqrt(t)),

    an outward spiral (the running average always lags, so the response
    keeps overshooting).  Valid on 0 < t <= 100 (series domain).
    """
    if not 0.0 < t <= FICTITIOUS_T_MAX:
        raise OutOfDomain(f"fictitious_self_play needs 0 < t <= {FICTITIOUS_T_MAX}")
    ber, bei = kelvin_ber0_bei0(2.0 * np.sqrt(t))
    return np.array([bei, ber])


def fictitious_average(t: float) -> np.ndarray:
    """Running-average companion ȳ(t) of :func:`fictitious_self_play`.

    From dy/dt = U ȳ: ȳ = −U dy/dt, with the Kelvin derivative identities
    ber' = (ber₁ + bei₁)/√2, bei' = (bei₁ − ber₁)/√2 applied at 2 sqrt(t).
    """
    from .special import kelvin_ber1_bei1

    if not 0.0 < t <= FICTITIOUS_T_MAX:
        raise OutOfDomain(f"fictitious_average needs 0 < t <= {FICTITIOUS_T_MAX}")
    x = 2.0 * np.sqrt(t)
    ber1, bei1 = kelvin_ber1_bei1(x)
    dber = (ber1 + bei1) / np.sqrt(2.0)
    dbei = (bei1 - ber1) / np.sqrt(2.0)
    dy = np.array([dbei, dber]) / np.sqrt(t)  # d/dt of (bei, ber)(2 sqrt t)
    return np.array([-dy[1], dy[0]])  # U⁻¹ dy/dt


def _rotation(angle: float, clockwise: bool) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    if clockwise:
        return np.array([[c, s], [-s, c]])
    return np.array([[c, -s], [s, c]])


def sga_epicycles(ys0, t: float) -> np.ndarray:
    """Population of n agents each ascending against the current average.

    Solves dy_j/dt = U (ȳ − y_j / n): the centroid turns clockwise at rate
    (n − 1)/n while each offset from the centroid turns counterclockwise at
    rate 1/n.  For n = 1 there are no opponents and nothing moves.
    """
    ys0 = np.atleast_2d(np.asarray(ys0, dtype=float))
    n = ys0.shape[0]
    centroid0 = ys0.mean(axis=0)
    offsets0 = ys0 - centroid0
    centroid = _rotation((1.0 - 1.0 / n) * t, clockwise=True) @ centroid0
    offsets = offsets0 @ _rotation(t / n, clockwise=False).T
    return centroid + offsets


def transitive_density(ratings, w0, total: float, t: float) -> np.ndarray:
    """Replicator weights for a pure rating game, any initial weights.

    With payout f_ij = r_i − r_j the solution is an exponential reweighting
    ``w_i(t) ∝ w0_i exp(t · P · r_i)`` renormalized to the conserved total
    P.  Requires Σ w0 = total.
    """
    ratings = np.asarray(ratings, dtype=float)
    w0 = np.asarray(w0, dtype=float)
    if np.any(w0 <= 0):
        raise OutOfDomain("initial weights must be positive")
    if abs(w0.sum() - total) > 1e-9 * max(1.0, abs(total)):
        raise OutOfDomain(f"initial weights sum to {w0.sum()!r}, not {total!r}")
    log_w = np.log(w0) + t * total * ratings
    log_w -= log_w.max()
    w = np.exp(log_w)
    return total * w / w.sum()


def gaussian_blowup_time(sigma0, hess_rating) -> float:
    """First time (Σ0⁻¹ − H t) stops being positive definite; inf if never."""
    sigma0 = np.asarray(sigma0, dtype=float)
    h = np.asarray(hess_rating, dtype=float)
    root = np.linalg.cholesky(sigma0)
    mu = np.linalg.eigvalsh(root.T @ h @ root)
    mu_max = float(mu[-1])
    return np.inf if mu_max <= 0 else 1.0 / mu_max


def gaussian_quadratic(xbar0, sigma0, grad, hess_rating, hess_cross, t: float,
                       n_steps: int = 2000):
    """Gaussian closure of the replicator flow for a quadratic payout.

    Payout ``f(x, x') = r(x) − r(x') + xᵀ C x'`` with rating
    ``r(x) = gᵀx + ½ xᵀ H x`` (H symmetric, C skew).  A Gaussian stays
    Gaussian: the covariance solves dΣ/dt = Σ H Σ in closed form,

        Σ(t) = (Σ0⁻¹ − H t)⁻¹,

    and the mean follows dx̄/dt = Σ(t)(g + (H + C) x̄), integrated here by
    Runge-Kutta on the closed-form covariance.  Raises :class:`BlowUp` at or
    beyond the time Σ0⁻¹ − H t loses positive definiteness.
    """
    xbar0 = np.atleast_1d(np.asarray(xbar0, dtype=float))
    sigma0 = np.atleast_2d(np.asarray(sigma0, dtype=float))
    g = np.atleast_1d(np.asarray(grad, dtype=float))
    h = np.atleast_2d(np.asarray(hess_rating, dtype=float))
    c = np.atleast_2d(np.asarray(hess_cross, dtype=float))
    if np.max(np.abs(h - h.T), initial=0.0) > 1e-12:
        raise NotSymmetric("rating Hessian must be symmetric")
    if np.max(np.abs(c + c.T), initial=0.0) > 1e-12:
        raise NotSkew("cross Hessian must be skew-symmetric")
    t_star = gaussian_blowup_time(sigma0, h)
    if t >= t_star:
        raise BlowUp(f"covariance solution exists only for t < {t_star!r}")

    sigma0_inv = np.linalg.inv(sigma0)
    jac = h + c

    def sigma_at(s):
        return np.linalg.inv(sigma0_inv - h * s)

    def vel(s, x):
        return sigma_at(s) @ (g + jac @ x)

    x = xbar0.copy()
    dt = t / n_steps if n_steps else 0.0
    for k in range(n_steps):
        s = k * dt
        k1 = vel(s, x)
        k2 = vel(s + 0.5 * dt, x + 0.5 * dt * k1)
        k3 = vel(s + 0.5 * dt, x + 0.5 * dt * k2)
        k4 = vel(s + dt, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x, sigma_at(t)


def laplace_oscillator(a: float, total: float, t: float) -> np.ndarray:
    """Orbit of the latent parameters for a product-Laplace base measure.

    For the constant-interaction-rate flow with unit Laplace marginals the
    orbit through (0, a) is

        θ1(t) = a sn(2 P t | a²),   θ2(t) = a cn(2 P t | a²) / dn(2 P t | a²),

    where P is the conserved population size of that orbit, P = 1/(1 − a²)
    for the axis-crossing start.  The motion is clockwise on a level set
    that morphs from a circle (small a) to the square |θ_j| = 1 (a → 1).
    """
    from .special import jacobi_sn_cn_dn

    if not 0.0 < a < 1.0:
        raise OutOfDomain(f"amplitude must satisfy 0 < a < 1, got {a}")
    sn, cn, dn = jacobi_sn_cn_dn(2.0 * total * t, a * a)
    return np.array([a * sn, a * cn / dn])


def laplace_population(a: float) -> float:
    """Conserved population of the Laplace orbit through (0, a)."""
    if not 0.0 < a < 1.0:
        raise OutOfDomain(f"amplitude must satisfy 0 < a < 1, got {a}")
    return 1.0 / (1.0 - a * a)


def laplace_period(a: float) -> float:
    """Amplitude-dependent period 2 (1 − a²) K(a²); → π as a → 0."""
    from .special import elliptic_k

    if not 0.0 < a < 1.0:
        raise OutOfDomain(f"amplitude must satisfy 0 < a < 1, got {a}")
    return 2.0 * (1.0 - a * a) * elliptic_k(a * a)
