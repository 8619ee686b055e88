"""Integration of the latent parameter dynamics dθ/dt = U ∇H(θ).

The flow is Hamiltonian, so the workhorse is the implicit midpoint rule
(symplectic, second order) solved by fixed-point iteration.  A dense
Runge-Kutta replicator on raw type weights is provided as the independent
cross-check: mapping its weights through an exact embedding must reproduce
the latent trajectory.
"""

from dataclasses import dataclass

import numpy as np

from .errors import HamiltonianOverflow, NoConvergence, OutOfDomain, StepTooLarge
from .hamiltonian import (
    MetaSystem,
    ReplicatorSystem,
    apply_u,
    grad_hamiltonian,
    hamiltonian,
    hess_hamiltonian,
    meta_grad,
    meta_hamiltonian,
    meta_rhs,
)
from . import serialize

FIXED_POINT_TOL = 1e-13
FIXED_POINT_MAX_ITER = 100
MAX_HALVINGS = 20
DIVERGENCE_THRESHOLD = 1e6


@dataclass
class ParameterTrajectory:
    """Recorded latent trajectory: times, parameters, H values, centroids.

    ``centroids[k]`` is ∇H(θ(t_k)) — the (unnormalized) latent population
    centroid.  ``divergent`` marks runs stopped because ‖θ‖ crossed the
    escape threshold: boundary-seeking dynamics, not a failure.
    """

    times: np.ndarray
    thetas: np.ndarray
    hamiltonians: np.ndarray
    centroids: np.ndarray
    divergent: bool = False

    @property
    def r(self) -> int:
        return self.thetas.shape[1]

    def to_csv(self, path) -> None:
        r = self.r
        header = (["t"] + [f"theta_{j + 1}" for j in range(r)]
                  + [f"ybar_{j + 1}" for j in range(r)] + ["H"])
        rows = np.column_stack([self.times, self.thetas, self.centroids,
                                self.hamiltonians])
        serialize.write_csv(path, header, rows)

    @classmethod
    def from_csv(cls, path) -> "ParameterTrajectory":
        header, data = serialize.read_csv(path)
        r = (len(header) - 2) // 2
        return cls(times=data[:, 0], thetas=data[:, 1:1 + r],
                   centroids=data[:, 1 + r:1 + 2 * r], hamiltonians=data[:, -1])


def rhs(sys: ReplicatorSystem, theta) -> np.ndarray:
    """Parameter velocity U ∇H(θ); always orthogonal to ∇H."""
    return apply_u(grad_hamiltonian(sys, theta))


def step_implicit_midpoint(sys, theta, dt: float, tol: float = FIXED_POINT_TOL):
    """One implicit midpoint step θ' = θ + dt · rhs((θ + θ') / 2).

    Solved by fixed-point iteration to ``tol`` in the max norm; raises
    :class:`NoConvergence` after 100 sweeps (callers respond by halving dt).
    Works for single systems and metasystems alike.
    """
    vf = (lambda th: meta_rhs(sys, th)) if isinstance(sys, MetaSystem) \
        else (lambda th: rhs(sys, th))
    theta = np.asarray(theta, dtype=float)
    new = theta + dt * vf(theta)
    for _ in range(FIXED_POINT_MAX_ITER):
        candidate = theta + dt * vf(0.5 * (theta + new))
        if np.max(np.abs(candidate - new)) <= tol:
            return candidate
        new = candidate
    raise NoConvergence("implicit midpoint fixed point stalled", last=new)


def _advance(sys, theta, dt, tol, depth=0):
    try:
        return step_implicit_midpoint(sys, theta, dt, tol=tol)
    except (NoConvergence, OutOfDomain, HamiltonianOverflow):
        # non-contracting, out-of-domain or exploding step: split it
        if depth >= MAX_HALVINGS:
            raise NoConvergence(
                f"step failed after {MAX_HALVINGS} halvings of dt", last=theta)
        half = _advance(sys, theta, dt / 2.0, tol, depth + 1)
        return _advance(sys, half, dt / 2.0, tol, depth + 1)


def _integrate(sys, h_fn, g_fn, theta0, t_max, dt, record_every,
               divergence_threshold, tol):
    theta = np.asarray(theta0, dtype=float).copy()
    n_steps = int(round(t_max / dt))
    times, thetas, hams, cents = [0.0], [theta.copy()], [h_fn(theta)], [g_fn(theta)]
    divergent = False
    for k in range(1, n_steps + 1):
        theta = _advance(sys, theta, dt, tol)
        if k % record_every == 0 or k == n_steps:
            times.append(k * dt)
            thetas.append(theta.copy())
            hams.append(h_fn(theta))
            cents.append(g_fn(theta))
        if np.linalg.norm(theta) > divergence_threshold:
            divergent = True
            if times[-1] != k * dt:
                times.append(k * dt)
                thetas.append(theta.copy())
                hams.append(h_fn(theta))
                cents.append(g_fn(theta))
            break
    return ParameterTrajectory(
        times=np.array(times), thetas=np.array(thetas),
        hamiltonians=np.array(hams), centroids=np.array(cents),
        divergent=divergent)


def integrate(sys: ReplicatorSystem, theta0, t_max: float, dt: float,
              record_every: int = 1,
              divergence_threshold: float = DIVERGENCE_THRESHOLD,
              tol: float = FIXED_POINT_TOL) -> ParameterTrajectory:
    """Integrate the latent dynamics with the implicit midpoint rule.

    Records every ``record_every`` steps.  When ‖θ‖ exceeds
    ``divergence_threshold`` the run stops and is marked divergent (no
    interior equilibrium: the population is running an iterated dominance
    sweep toward the boundary).
    """
    if t_max <= 0 or dt <= 0:
        raise OutOfDomain("t_max and dt must be positive")
    return _integrate(sys, lambda th: hamiltonian(sys, th),
                      lambda th: grad_hamiltonian(sys, th),
                      theta0, t_max, dt, record_every, divergence_threshold, tol)


def integrate_meta(meta: MetaSystem, theta0, t_max: float, dt: float,
                   record_every: int = 1,
                   divergence_threshold: float = DIVERGENCE_THRESHOLD,
                   tol: float = FIXED_POINT_TOL) -> ParameterTrajectory:
    """Implicit midpoint on the coupled patch dynamics dΘ/dt = (M⊗U)∇H."""
    if t_max <= 0 or dt <= 0:
        raise OutOfDomain("t_max and dt must be positive")
    return _integrate(meta, lambda th: meta_hamiltonian(meta, th),
                      lambda th: meta_grad(meta, th),
                      theta0, t_max, dt, record_every, divergence_threshold, tol)


@dataclass
class WeightTrajectory:
    """Raw replicator weights over time (dense oracle route)."""

    times: np.ndarray
    weights: np.ndarray

    def to_csv(self, path) -> None:
        header = ["t"] + [f"w_{j + 1}" for j in range(self.weights.shape[1])]
        serialize.write_csv(path, header, np.column_stack([self.times, self.weights]))


def direct_replicator(game, w0, growth=None, dt: float = 0.01,
                      t_max: float = 10.0, record_every: int = 1) -> WeightTrajectory:
    """Classic fourth-order Runge-Kutta on the raw weight dynamics.

    Integrates dw_i/dt = g(w_i) Σ_j f_ij w_j where ``f`` comes either from a
    payout matrix or from an embedding's reconstruction.  The support never
    collapses: any step that would produce a non-positive weight is retried
    with a bisected dt.  For linear growth the total weight is conserved.
    """
    from .hamiltonian import GROWTH_LAWS, Linear
    from .embedding import DiscEmbedding, reconstruct_matrix
    from .payout import PayoutMatrix

    if growth is None:
        growth = Linear
    elif isinstance(growth, str):
        growth = GROWTH_LAWS[growth]
    if isinstance(game, PayoutMatrix):
        f = game.entries
    elif isinstance(game, DiscEmbedding):
        f = reconstruct_matrix(game)
    else:
        f = np.asarray(game, dtype=float)
    w = np.asarray(w0, dtype=float).copy()
    if np.any(w <= 0):
        raise OutOfDomain("initial weights must be strictly positive")

    def vel(weights):
        return growth.g(weights) * (f @ weights)

    def rk4_step(weights, h):
        k1 = vel(weights)
        k2 = vel(weights + 0.5 * h * k1)
        k3 = vel(weights + 0.5 * h * k2)
        k4 = vel(weights + h * k3)
        return weights + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def advance(weights, h, depth=0):
        out = rk4_step(weights, h)
        if np.all(out > 0):
            return out
        if depth >= MAX_HALVINGS:
            raise StepTooLarge("weights stayed non-positive after 20 bisections")
        half = advance(weights, h / 2.0, depth + 1)
        return advance(half, h / 2.0, depth + 1)

    n_steps = int(round(t_max / dt))
    times, weights = [0.0], [w.copy()]
    for k in range(1, n_steps + 1):
        w = advance(w, dt)
        if k % record_every == 0 or k == n_steps:
            times.append(k * dt)
            weights.append(w.copy())
    return WeightTrajectory(times=np.array(times), weights=np.array(weights))


def centroid_rhs_check(sys: ReplicatorSystem, theta) -> float:
    """Residual of the latent adaptive-dynamics identity at θ.

    The centroid ȳ = ∇H obeys dȳ/dt = Hess(θ) U ∇H(θ) along trajectories
    (chain rule through dθ/dt = U ∇H).  Both sides are assembled through
    separate code paths and the norm of their difference is returned; it is
    zero up to floating point noise and is exposed so trajectory-level
    finite-difference checks have a reference.
    """
    theta = np.asarray(theta, dtype=float)
    hess = hess_hamiltonian(sys, theta)
    lhs = hess @ rhs(sys, theta)
    rhs_side = hess @ apply_u(grad_hamiltonian(sys, theta))
    return float(np.linalg.norm(lhs - rhs_side))


def recurrence_return(traj: ParameterTrajectory, theta_ref, eps: float):
    """First return time of a recorded trajectory to an eps-ball.

    Departure is the first time the distance to ``theta_ref`` exceeds 2 eps;
    the return is the earliest later time it falls back to eps, linearly
    interpolated between samples.  None when no return occurs within the
    recorded horizon.
    """
    theta_ref = np.asarray(theta_ref, dtype=float)
    dist = np.linalg.norm(traj.thetas - theta_ref[None, :], axis=1)
    beyond = np.flatnonzero(dist > 2.0 * eps)
    if beyond.size == 0:
        return None
    start = beyond[0]
    for k in range(start + 1, len(dist)):
        if dist[k] <= eps:
            d0, d1 = dist[k - 1], dist[k]
            t0, t1 = traj.times[k - 1], traj.times[k]
            if d0 <= eps:
                return float(t0)
            frac = (d0 - eps) / (d0 - d1)
            return float(t0 + frac * (t1 - t0))
    return None
