"""Population-size Hamiltonians of tilted base measures in latent space.

A replicator system is a base measure over latent coordinates plus a growth
law.  Exponentially tilting the base measure by parameters θ gives the
population; its total size (or the generalized analogue for non-linear
growth) is the Hamiltonian conserved by the parameter dynamics.  The
gradient of the Hamiltonian is the unnormalized population centroid in
latent space and its Hessian the Gram matrix of the coordinates under the
current population, so all three are evaluated together from shared
closed forms.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSupport,
    DimensionMismatch,
    HamiltonianOverflow,
    NotSymmetric,
    OutOfDomain,
)
from .special import lambert_w_exp
from . import serialize

LOG_OVERFLOW = 700.0


# ---------------------------------------------------------------------------
# growth laws
# ---------------------------------------------------------------------------

class Linear:
    """Classical replicator growth: rate factor g(π) = π, h = log."""

    name = "linear"

    @staticmethod
    def g(pi):
        return pi

    @staticmethod
    def h(pi):
        return np.log(pi)

    @staticmethod
    def h_inv(u):
        return np.exp(u)

    @staticmethod
    def h_inv_prime(u):
        return np.exp(u)

    @staticmethod
    def antiderivative(s):
        """∫_0^s h⁻¹(u) du."""
        return np.expm1(s)


class Saturating:
    """Saturating per-capita rates: g(π) = π / (1 + π).

    h(π) = (π − 1) + log π and h⁻¹(u) = W(e^{u+1}); the antiderivative of
    h⁻¹ closes over w = W(e^{u+1}) as w²/2 + w.
    """

    name = "saturating"

    @staticmethod
    def g(pi):
        return pi / (1.0 + pi)

    @staticmethod
    def h(pi):
        return (pi - 1.0) + np.log(pi)

    @staticmethod
    def h_inv(u):
        return lambert_w_exp(np.asarray(u, dtype=float) + 1.0)

    @staticmethod
    def h_inv_prime(u):
        w = Saturating.h_inv(u)
        return w / (1.0 + w)

    @staticmethod
    def antiderivative(s):
        w = lambert_w_exp(np.asarray(s, dtype=float) + 1.0)
        return 0.5 * w * w + w - 1.5  # zero at s = 0 where W(e) = 1


class Allee:
    """Growth suppressed at low density: g(π) = π² / (1 + π).

    h(π) = 1 − 1/π + log π and h⁻¹(u) = 1 / W(e^{1−u}); the antiderivative
    of h⁻¹ closes over w = W(e^{1−u}) as 1/w − log w.
    """

    name = "allee"

    @staticmethod
    def g(pi):
        return pi * pi / (1.0 + pi)

    @staticmethod
    def h(pi):
        return 1.0 - 1.0 / pi + np.log(pi)

    @staticmethod
    def h_inv(u):
        return 1.0 / lambert_w_exp(1.0 - np.asarray(u, dtype=float))

    @staticmethod
    def h_inv_prime(u):
        pi = Allee.h_inv(u)
        return Allee.g(pi)

    @staticmethod
    def antiderivative(s):
        w = lambert_w_exp(1.0 - np.asarray(s, dtype=float))
        return (1.0 / w - np.log(w)) - 1.0  # zero at s = 0 where W(e) = 1


GROWTH_LAWS = {cls.name: cls for cls in (Linear, Saturating, Allee)}


def growth_roundtrip(growth, u):
    """h(h⁻¹(u)); identity to ~1e−12 on |u| <= 30 for every growth law."""
    return growth.h(growth.h_inv(u))


# ---------------------------------------------------------------------------
# base measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParticleCloud:
    """Finite atomic base measure: m latent points with positive masses."""

    points: np.ndarray
    masses: np.ndarray

    def __init__(self, points, masses=None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if masses is None:
            ms = np.ones(pts.shape[0])
        else:
            ms = np.asarray(masses, dtype=float)
        if ms.shape != (pts.shape[0],):
            raise DimensionMismatch(
                f"{ms.shape} masses for {pts.shape[0]} points")
        if np.any(ms <= 0) or not np.all(np.isfinite(ms)):
            raise OutOfDomain("masses must be finite and strictly positive")
        if not np.all(np.isfinite(pts)):
            raise OutOfDomain("points must be finite")
        pts, ms = pts.copy(), ms.copy()
        pts.flags.writeable = False
        ms.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", ms)

    @property
    def r(self) -> int:
        return self.points.shape[1]

    def spans_space(self, tol: float = 1e-12) -> bool:
        """Whether the mass-weighted points span all of latent space."""
        scaled = np.sqrt(self.masses)[:, None] * self.points
        s = np.linalg.svd(scaled, compute_uv=False)
        return bool(s.size and s[-1] > tol * max(s[0], 1.0))


@dataclass(frozen=True)
class UniformInterval:
    """Uniform marginal on [−half_width, half_width]; mgf sinh(hθ)/(hθ)."""

    half_width: float = 1.0

    def log_mgf(self, t):
        x = self.half_width * t
        return _log_sinhc(x)

    def dlog_mgf(self, t):
        x = self.half_width * t
        return self.half_width * _coth_minus_inv(x)

    def d2log_mgf(self, t):
        x = self.half_width * t
        return self.half_width ** 2 * _coth_minus_inv_prime(x)

    def check_domain(self, t):
        pass


@dataclass(frozen=True)
class LaplaceUnit:
    """Unit Laplace marginal (density e^{−|y|}/2); mgf 1/(1−θ²), |θ| < 1."""

    def log_mgf(self, t):
        return -np.log1p(-(t * t))

    def dlog_mgf(self, t):
        return 2.0 * t / (1.0 - t * t)

    def d2log_mgf(self, t):
        q = 1.0 - t * t
        return 2.0 * (1.0 + t * t) / (q * q)

    def check_domain(self, t):
        if abs(t) >= 1.0:
            raise OutOfDomain(f"Laplace marginal needs |θ| < 1, got {t}")


@dataclass(frozen=True)
class GaussianUnit:
    """Standard normal marginal; mgf e^{θ²/2}."""

    def log_mgf(self, t):
        return 0.5 * t * t

    def dlog_mgf(self, t):
        return t

    def d2log_mgf(self, t):
        return 1.0

    def check_domain(self, t):
        pass


@dataclass(frozen=True)
class ProductMarginals:
    """Product base measure: one independent marginal per coordinate."""

    marginals: tuple

    def __init__(self, marginals):
        object.__setattr__(self, "marginals", tuple(marginals))

    @property
    def r(self) -> int:
        return len(self.marginals)


def _log_sinhc(x):
    """log(sinh(x)/x) with the smooth x → 0 limit of 0."""
    ax = abs(x)
    if ax < 1e-4:
        x2 = x * x
        return np.log1p(x2 / 6.0 * (1.0 + x2 / 20.0))
    return ax + math.log1p(-math.exp(-2.0 * ax)) - math.log(2.0 * ax)


def _coth_minus_inv(x):
    """coth(x) − 1/x, the derivative of log sinhc; odd, ~x/3 near 0."""
    if abs(x) < 1e-4:
        return x / 3.0 - x ** 3 / 45.0
    return 1.0 / math.tanh(x) - 1.0 / x


def _coth_minus_inv_prime(x):
    """1/x² − csch²(x); even, → 1/3 at 0."""
    if abs(x) < 1e-3:
        return 1.0 / 3.0 - x * x / 15.0
    s = math.sinh(x)
    return 1.0 / (x * x) - 1.0 / (s * s)


# ---------------------------------------------------------------------------
# replicator systems
# ---------------------------------------------------------------------------

RATE_MODES = ("linear", "constant")


@dataclass(frozen=True)
class ReplicatorSystem:
    """Base measure + growth law + interaction-rate mode.

    ``rate_mode="linear"`` uses the total population itself as the
    Hamiltonian; ``"constant"`` uses its logarithm (Linear growth only),
    which traces the same orbits at a population-independent rate.
    Non-linear growth laws require a particle cloud.
    """

    r: int
    base: object
    growth: object = Linear
    rate_mode: str = "linear"
    u0: np.ndarray = field(default=None, repr=False)

    def __init__(self, base, growth=Linear, rate_mode="linear"):
        if isinstance(growth, str):
            growth = GROWTH_LAWS[growth]
        if rate_mode not in RATE_MODES:
            raise OutOfDomain(f"rate_mode must be one of {RATE_MODES}")
        r = base.r
        if r % 2 != 0:
            raise DimensionMismatch(f"latent dimension must be even, got {r}")
        if rate_mode == "constant" and growth is not Linear:
            raise OutOfDomain("constant interaction rate requires linear growth")
        if growth is not Linear and not isinstance(base, ParticleCloud):
            raise OutOfDomain("non-linear growth laws require a ParticleCloud base")
        u0 = None
        if isinstance(base, ParticleCloud) and growth is not Linear:
            u0 = growth.h(base.masses)
            u0.flags.writeable = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "growth", growth)
        object.__setattr__(self, "rate_mode", rate_mode)
        object.__setattr__(self, "u0", u0)

    @property
    def degenerate_support(self) -> bool:
        """True when a cloud base fails to span latent space affinely."""
        if isinstance(self.base, ParticleCloud):
            return not self.base.spans_space()
        return False

    def current_weights(self, theta) -> np.ndarray:
        """Per-particle population weights at parameters θ (cloud bases)."""
        theta = _check_theta(self, theta)
        if not isinstance(self.base, ParticleCloud):
            raise OutOfDomain("current_weights needs a ParticleCloud base")
        if self.growth is Linear:
            return self.base.masses * np.exp(self.base.points @ theta)
        return self.growth.h_inv(self.u0 + self.base.points @ theta)


def _check_theta(sys: ReplicatorSystem, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (sys.r,):
        raise DimensionMismatch(f"theta shape {theta.shape}, expected ({sys.r},)")
    if not np.all(np.isfinite(theta)):
        raise OutOfDomain("theta must be finite")
    if isinstance(sys.base, ProductMarginals):
        for marg, t in zip(sys.base.marginals, theta):
            marg.check_domain(t)
    return theta


def _cloud_log_terms(sys: ReplicatorSystem, theta):
    """log m_i + θ·y_i for the linear-growth cloud, plus their log-sum-exp."""
    a = np.log(sys.base.masses) + sys.base.points @ theta
    m = float(np.max(a))
    logsum = m + math.log(float(np.sum(np.exp(a - m))))
    return a, logsum


def _check_exp(logsum: float) -> float:
    if logsum > LOG_OVERFLOW:
        raise HamiltonianOverflow(f"log total population {logsum:.1f} exceeds 700")
    return float(np.exp(logsum))


def hamiltonian(sys: ReplicatorSystem, theta) -> float:
    """Value of the conserved Hamiltonian at parameters θ.

    Linear growth: the total population P(θ) (or log P for constant rate).
    For a particle cloud P(θ) = Σ m_i e^{θ·y_i}; for product marginals it is
    the product of the marginal moment generating functions.  Non-linear
    growth on a cloud: Σ_i ∫_0^{u0_i + θ·y_i} h⁻¹(u) du with
    u0_i = h(m_i), which reduces to P(θ) + const for linear growth.
    """
    theta = _check_theta(sys, theta)
    if isinstance(sys.base, ProductMarginals):
        log_p = sum(m.log_mgf(t) for m, t in zip(sys.base.marginals, theta))
        if sys.rate_mode == "constant":
            return float(log_p)
        return _check_exp(log_p)
    if sys.growth is Linear:
        _, logsum = _cloud_log_terms(sys, theta)
        return float(logsum) if sys.rate_mode == "constant" else _check_exp(logsum)
    u = sys.u0 + sys.base.points @ theta
    if np.max(u) > LOG_OVERFLOW:
        raise HamiltonianOverflow("tilted log-density exceeds 700")
    return float(np.sum(sys.growth.antiderivative(u)))


def grad_hamiltonian(sys: ReplicatorSystem, theta) -> np.ndarray:
    """Gradient of the Hamiltonian: the unnormalized latent centroid.

    (For constant rate mode the gradient of log P is the normalized
    centroid.)  Matches central finite differences of :func:`hamiltonian`.
    """
    theta = _check_theta(sys, theta)
    if isinstance(sys.base, ProductMarginals):
        g = np.array([m.dlog_mgf(t) for m, t in zip(sys.base.marginals, theta)])
        if sys.rate_mode == "constant":
            return g
        return hamiltonian(sys, theta) * g
    if sys.growth is Linear:
        a, logsum = _cloud_log_terms(sys, theta)
        p = np.exp(a - logsum)  # normalized particle weights
        centroid = p @ sys.base.points
        if sys.rate_mode == "constant":
            return centroid
        return _check_exp(logsum) * centroid
    w = sys.growth.h_inv(sys.u0 + sys.base.points @ theta)
    return w @ sys.base.points


def hess_hamiltonian(sys: ReplicatorSystem, theta) -> np.ndarray:
    """Hessian of the Hamiltonian.

    For linear growth on a cloud this is the second-moment matrix
    Σ w_i(θ) y_i y_iᵀ (covariance for constant rate); it is positive
    definite whenever the cloud spans latent space.
    """
    theta = _check_theta(sys, theta)
    if isinstance(sys.base, ProductMarginals):
        g = np.array([m.dlog_mgf(t) for m, t in zip(sys.base.marginals, theta)])
        dg = np.array([m.d2log_mgf(t) for m, t in zip(sys.base.marginals, theta)])
        if sys.rate_mode == "constant":
            return np.diag(dg)
        p = hamiltonian(sys, theta)
        return p * (np.diag(dg) + np.outer(g, g))
    pts = sys.base.points
    if sys.growth is Linear:
        a, logsum = _cloud_log_terms(sys, theta)
        if sys.rate_mode == "constant":
            p = np.exp(a - logsum)
            centroid = p @ pts
            h = (p[:, None] * pts).T @ pts - np.outer(centroid, centroid)
        else:
            w = np.exp(a - logsum) * _check_exp(logsum)
            h = (w[:, None] * pts).T @ pts
    else:
        gw = sys.growth.g(sys.growth.h_inv(sys.u0 + pts @ theta))
        h = (gw[:, None] * pts).T @ pts
    return 0.5 * (h + h.T)  # exact symmetry for downstream eigensolves


def min_hessian_eigenvalue(sys: ReplicatorSystem, theta) -> float:
    """Smallest Hessian eigenvalue; <= 0 flags a degenerate cloud."""
    return float(np.linalg.eigvalsh(hess_hamiltonian(sys, theta))[0])


def require_spanning(sys: ReplicatorSystem) -> None:
    """Raise DegenerateSupport when the cloud lies in a hyperplane through 0."""
    if sys.degenerate_support:
        raise DegenerateSupport("particle cloud does not span latent space")


# ---------------------------------------------------------------------------
# metapopulations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetaSystem:
    """Patch systems coupled through a symmetric positive mixing matrix."""

    patches: tuple
    mixing: np.ndarray

    def __init__(self, patches, mixing):
        patches = tuple(patches)
        m = np.asarray(mixing, dtype=float)
        l = len(patches)
        if m.shape != (l, l):
            raise DimensionMismatch(f"mixing shape {m.shape} for {l} patches")
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise NotSymmetric("mixing matrix must be symmetric within 1e-12")
        if np.any(np.diag(m) <= 0):
            raise OutOfDomain("mixing matrix needs positive diagonal entries")
        r = patches[0].r
        for p in patches:
            if p.r != r:
                raise DimensionMismatch("patches must share the latent dimension")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "patches", patches)
        object.__setattr__(self, "mixing", m)

    @property
    def l(self) -> int:
        return len(self.patches)

    @property
    def r(self) -> int:
        return self.patches[0].r

    def split(self, big_theta) -> list:
        big_theta = np.asarray(big_theta, dtype=float)
        if big_theta.shape != (self.l * self.r,):
            raise DimensionMismatch(
                f"theta shape {big_theta.shape}, expected ({self.l * self.r},)")
        return [big_theta[i * self.r:(i + 1) * self.r] for i in range(self.l)]


def apply_u(v: np.ndarray) -> np.ndarray:
    """Multiply by the block-diagonal quarter-turn matrix U.

    Per coordinate pair: (v1, v2) -> (v2, −v1).  U is skew-symmetric and
    orthogonal, so fields of the form U ∇H are divergence-free and
    orthogonal to ∇H.
    """
    out = np.empty_like(v)
    out[0::2] = v[1::2]
    out[1::2] = -v[0::2]
    return out


def kron_mixing_u(meta: MetaSystem) -> np.ndarray:
    """Dense M ⊗ U; skew-symmetric because M is symmetric and U skew."""
    u = np.zeros((meta.r, meta.r))
    for k in range(meta.r // 2):
        u[2 * k, 2 * k + 1] = 1.0
        u[2 * k + 1, 2 * k] = -1.0
    return np.kron(meta.mixing, u)


def meta_hamiltonian(meta: MetaSystem, big_theta) -> float:
    """Composite Hamiltonian Σ_i H_i(θ_i); conserved by the coupled flow."""
    return float(sum(hamiltonian(p, th)
                     for p, th in zip(meta.patches, meta.split(big_theta))))


def meta_grad(meta: MetaSystem, big_theta) -> np.ndarray:
    return np.concatenate([grad_hamiltonian(p, th)
                           for p, th in zip(meta.patches, meta.split(big_theta))])


def meta_rhs(meta: MetaSystem, big_theta) -> np.ndarray:
    """(M ⊗ U) ∇H: the coupled parameter velocity across all patches."""
    grads = [grad_hamiltonian(p, th)
             for p, th in zip(meta.patches, meta.split(big_theta))]
    out = np.zeros(meta.l * meta.r)
    for i in range(meta.l):
        acc = np.zeros(meta.r)
        for j in range(meta.l):
            acc += meta.mixing[i, j] * grads[j]
        out[i * meta.r:(i + 1) * meta.r] = apply_u(acc)
    return out


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def _base_to_doc(base):
    if isinstance(base, ParticleCloud):
        return {"type": "cloud", "points": base.points, "masses": base.masses}
    parts = []
    for m in base.marginals:
        if isinstance(m, UniformInterval):
            parts.append({"type": "uniform", "half_width": m.half_width})
        elif isinstance(m, LaplaceUnit):
            parts.append({"type": "laplace"})
        elif isinstance(m, GaussianUnit):
            parts.append({"type": "gaussian"})
        else:
            raise OutOfDomain(f"cannot serialize marginal {m!r}")
    return {"type": "marginals", "marginals": parts}


def _base_from_doc(doc):
    if doc["type"] == "cloud":
        return ParticleCloud(np.asarray(doc["points"], dtype=float),
                             np.asarray(doc["masses"], dtype=float))
    kinds = {"uniform": lambda d: UniformInterval(float(d.get("half_width", 1.0))),
             "laplace": lambda d: LaplaceUnit(),
             "gaussian": lambda d: GaussianUnit()}
    return ProductMarginals([kinds[m["type"]](m) for m in doc["marginals"]])


def system_to_json(sys: ReplicatorSystem, path=None):
    doc = {
        "r": sys.r,
        "base": _base_to_doc(sys.base),
        "growth": sys.growth.name,
        "rate_mode": sys.rate_mode,
    }
    if path is None:
        return serialize.dumps(doc)
    serialize.dump(doc, path)
    return None


def system_from_json(source) -> ReplicatorSystem:
    import json
    import os

    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        doc = serialize.load(source)
    else:
        doc = json.loads(source)
    return ReplicatorSystem(_base_from_doc(doc["base"]),
                            growth=GROWTH_LAWS[doc["growth"]],
                            rate_mode=doc["rate_mode"])
