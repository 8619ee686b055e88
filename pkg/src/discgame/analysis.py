"""Geometric and spectral diagnostics for latent-space dynamics.

The central dichotomy: the parameter flow recurs if and only if the convex
hull of the embedded agents contains the origin in its interior, in which
case the Hamiltonian has a unique interior minimizer (the fully mixed
equilibrium) around which small orbits are harmonic.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePoints,
    HamiltonianOverflow,
    NoConvergence,
    NotEquilibrium,
    OriginNotInterior,
    OutOfDomain,
    Unattainable,
)
from .hamiltonian import (
    ParticleCloud,
    ProductMarginals,
    ReplicatorSystem,
    apply_u,
    grad_hamiltonian,
    hamiltonian,
    hess_hamiltonian,
)

HULL_TOL = 1e-9
LP_FEAS_TOL = 1e-9
NEWTON_MAX_ITER = 200
NEWTON_GRAD_TOL = 1e-10
CENTROID_TOL = 1e-9
THETA_ESCAPE = 1e4


# ---------------------------------------------------------------------------
# convex geometry in the plane
# ---------------------------------------------------------------------------

def _cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def convex_hull_2d(points) -> np.ndarray:
    """Counterclockwise convex hull by Andrew's monotone chain."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] < 3:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross2(chain[-1] - chain[-2],
                                              p - chain[-2]) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _edge_clearances(hull, point):
    """Signed distance of ``point`` inside each CCW hull edge (+ inside)."""
    nxt = np.roll(hull, -1, axis=0)
    edges = nxt - hull
    lengths = np.linalg.norm(edges, axis=1)
    rel = point[None, :] - hull
    return (edges[:, 0] * rel[:, 1] - edges[:, 1] * rel[:, 0]) / lengths


def _affine_rank_check(points, r):
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=True)
    scale = max(float(s[0]) if s.size else 0.0, 1.0)
    deficient = [vt[j] for j in range(r) if j >= s.size or s[j] <= 1e-12 * scale]
    if deficient:
        raise DegeneratePoints(
            f"points span an affine subspace of dimension {r - len(deficient)} < {r}",
            deficient_directions=np.array(deficient))


def origin_in_hull_interior(points, tol: float = HULL_TOL) -> bool:
    """Whether the origin lies strictly inside the convex hull of ``points``.

    In the plane: exact hull plus an edge-clearance margin.  In higher
    dimension: the polar set {d : d·y_i <= 1} is bounded iff the origin is
    interior, so 2r linear programs max ±d_j subject to those constraints
    are solved with a dense simplex; all bounded ⟺ interior.

    Raises :class:`DegeneratePoints` when the points are affinely
    degenerate (the hull then has empty interior).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = pts.shape[1]
    if pts.shape[0] < r + 1:
        raise DegeneratePoints(f"need at least {r + 1} points in dimension {r}")
    _affine_rank_check(pts, r)
    if r == 1:
        return bool(pts.min() < -tol and pts.max() > tol)
    if r == 2:
        hull = convex_hull_2d(pts)
        if hull.shape[0] < 3:
            return False
        return bool(np.all(_edge_clearances(hull, np.zeros(2)) > tol))
    for j in range(r):
        for sign in (1.0, -1.0):
            c = np.zeros(r)
            c[j] = sign
            bounded, _ = _simplex_max(c, pts)
            if not bounded:
                return False
    return True


def _simplex_max(c, a_rows):
    """Maximize c·d subject to a_rows @ d <= 1, d free.

    Dense tableau simplex with Bland's rule (no cycling); d is split into
    positive and negative parts and the all-slack basis is feasible because
    the right-hand side is 1.  Returns (bounded, optimum).
    """
    m, r = a_rows.shape
    n_var = 2 * r + m
    tableau = np.zeros((m, n_var + 1))
    tableau[:, :r] = a_rows
    tableau[:, r:2 * r] = -a_rows
    tableau[:, 2 * r:2 * r + m] = np.eye(m)
    tableau[:, -1] = 1.0
    cost = np.zeros(n_var)
    cost[:r] = c
    cost[r:2 * r] = -c
    basis = list(range(2 * r, 2 * r + m))

    for _ in range(20000):
        cb = cost[basis]
        reduced = cost - cb @ tableau[:, :-1]
        entering = -1
        for j in range(n_var):  # Bland: smallest improving index
            if reduced[j] > LP_FEAS_TOL:
                entering = j
                break
        if entering < 0:
            return True, float(cb @ tableau[:, -1])
        col = tableau[:, entering]
        positive = col > LP_FEAS_TOL
        if not np.any(positive):
            return False, np.inf  # unbounded ray certificate
        ratios = np.full(m, np.inf)
        ratios[positive] = tableau[positive, -1] / col[positive]
        best = np.min(ratios)
        leaving = -1
        for i in range(m):  # Bland: smallest basis index among ties
            if ratios[i] <= best + LP_FEAS_TOL * max(1.0, best):
                if leaving < 0 or basis[i] < basis[leaving]:
                    leaving = i
        pivot = tableau[leaving, entering]
        tableau[leaving] /= pivot
        for i in range(m):
            if i != leaving and tableau[i, entering] != 0.0:
                tableau[i] -= tableau[i, entering] * tableau[leaving]
        basis[leaving] = entering
    raise NoConvergence("simplex iteration limit reached")


# ---------------------------------------------------------------------------
# equilibrium and moment inversion
# ---------------------------------------------------------------------------

def _system_hull_has_origin(sys: ReplicatorSystem) -> bool:
    if isinstance(sys.base, ProductMarginals):
        return True  # all supported marginals are centered with interior support
    try:
        return origin_in_hull_interior(sys.base.points)
    except DegeneratePoints:
        return False


def _newton_convex(value, grad, hess, theta0, target_tol, escape=None):
    """Damped Newton on a strictly convex function; returns the minimizer.

    Backtracks on the Armijo rule; once decreases fall below float
    resolution the full in-domain Newton step is taken instead (locally the
    exact step on a strictly convex function).
    """
    theta = np.asarray(theta0, dtype=float).copy()
    for _ in range(NEWTON_MAX_ITER):
        g = grad(theta)
        if np.linalg.norm(g) <= target_tol:
            return theta
        try:
            step = np.linalg.solve(hess(theta), -g)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Hessian: {exc}", last=theta)
        f0 = value(theta)
        alpha, accepted, fallback = 1.0, None, None
        while alpha > 1e-12:
            cand = theta + alpha * step
            try:
                val = value(cand)
            except (OutOfDomain, HamiltonianOverflow):
                alpha *= 0.5
                continue
            if fallback is None:
                fallback = cand  # largest in-domain step
            if val < f0 + 1e-4 * alpha * float(g @ step):
                accepted = cand
                break
            alpha *= 0.5
        if accepted is None and fallback is None:
            raise NoConvergence("no in-domain step found", last=theta)
        theta = accepted if accepted is not None else fallback
        if escape is not None and np.linalg.norm(theta) > escape:
            raise Unattainable("Newton iterates escaping to infinity")
    raise NoConvergence("Newton did not converge in 200 iterations", last=theta)


def find_equilibrium(sys: ReplicatorSystem, grad_tol: float = NEWTON_GRAD_TOL):
    """Locate the unique interior equilibrium, or None when there is none.

    The equilibrium is the global minimizer of the strictly convex
    Hamiltonian; it exists iff the origin is interior to the hull of the
    embedded support, so that test short-circuits the Newton solve.
    """
    if not _system_hull_has_origin(sys):
        return None
    scale = max(1.0, abs(hamiltonian(sys, np.zeros(sys.r))))
    return _newton_convex(lambda th: hamiltonian(sys, th),
                          lambda th: grad_hamiltonian(sys, th),
                          lambda th: hess_hamiltonian(sys, th),
                          np.zeros(sys.r), grad_tol * scale)


def invert_centroid(sys: ReplicatorSystem, ybar_target,
                    tol: float = CENTROID_TOL) -> np.ndarray:
    """Parameters whose latent centroid equals ``ybar_target``.

    Minimizes the strictly convex H(θ) − ȳ·θ by damped Newton; diverging
    iterates (‖θ‖ > 1e4) signal a target outside the attainable moment
    region and raise :class:`Unattainable`.
    """
    target = np.asarray(ybar_target, dtype=float)

    def value(th):
        return hamiltonian(sys, th) - float(target @ th)

    def grad(th):
        return grad_hamiltonian(sys, th) - target

    try:
        theta = _newton_convex(value, grad,
                               lambda th: hess_hamiltonian(sys, th),
                               np.zeros(sys.r), tol, escape=THETA_ESCAPE)
    except NoConvergence as exc:
        if exc.last is not None and np.linalg.norm(exc.last) > 0.1 * THETA_ESCAPE:
            raise Unattainable("target centroid outside the moment region") from exc
        raise
    return theta


def linearization_frequencies(sys: ReplicatorSystem, theta_star,
                              grad_tol: float = 1e-6) -> np.ndarray:
    """Oscillation frequencies of the flow linearized at an equilibrium.

    Eigenvalues of U · Hess(θ*) are purely imaginary conjugate pairs
    (checked: real parts below 1e−8 of the spectral radius); the sorted
    magnitudes of one member per pair are returned, largest first.
    """
    theta_star = np.asarray(theta_star, dtype=float)
    g = grad_hamiltonian(sys, theta_star)
    scale = max(1.0, abs(hamiltonian(sys, theta_star)))
    if np.linalg.norm(g) > grad_tol * scale:
        raise NotEquilibrium(f"gradient norm {np.linalg.norm(g):.3e} too large")
    jac = np.array([apply_u(col) for col in hess_hamiltonian(sys, theta_star).T]).T
    eigvals = np.linalg.eigvals(jac)
    radius = float(np.max(np.abs(eigvals)))
    if np.max(np.abs(eigvals.real)) > 1e-8 * radius:
        raise NotEquilibrium("linearization has non-imaginary eigenvalues")
    freqs = np.sort(eigvals.imag[eigvals.imag > 0])[::-1]
    return freqs


# ---------------------------------------------------------------------------
# polygons, curl, periods
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polygon2D:
    """Simple polygon with counterclockwise vertices."""

    vertices: np.ndarray

    def __init__(self, vertices):
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        if v.shape[0] < 3 or v.shape[1] != 2:
            raise OutOfDomain(f"polygon needs >= 3 planar vertices, got {v.shape}")
        if _shoelace(v) <= 0:
            raise OutOfDomain("vertices must be in counterclockwise order")
        if _self_intersects(v):
            raise OutOfDomain("polygon must be simple (non-self-intersecting)")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def k(self) -> int:
        return self.vertices.shape[0]


def _shoelace(v) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _self_intersects(v) -> bool:
    k = v.shape[0]

    def segs_cross(p1, p2, q1, q2):
        d1 = _cross2(p2 - p1, q1 - p1)
        d2 = _cross2(p2 - p1, q2 - p1)
        d3 = _cross2(q2 - q1, p1 - q1)
        d4 = _cross2(q2 - q1, p2 - q1)
        return (d1 * d2 < 0) and (d3 * d4 < 0)

    for i in range(k):
        for j in range(i + 1, k):
            if j in (i, (i + 1) % k) or i == (j + 1) % k:
                continue
            if segs_cross(v[i], v[(i + 1) % k], v[j], v[(j + 1) % k]):
                return True
    return False


def dual_polygon(poly: Polygon2D) -> Polygon2D:
    """Polar reciprocal with respect to the unit circle.

    Edge j of the input maps to vertex ``n_j / (n_j · p_j)`` (outward
    normal over its support value); large-amplitude parameter orbits of a
    uniform measure on the polygon converge to scaled copies of this dual.
    The construction is an involution: the dual of the dual recovers the
    original up to cyclic vertex order.  Requires the origin strictly
    inside.
    """
    v = poly.vertices
    if not bool(np.all(_edge_clearances(v, np.zeros(2)) > HULL_TOL)):
        raise OriginNotInterior("polar reciprocation needs the origin inside")
    nxt = np.roll(v, -1, axis=0)
    edges = nxt - v
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])  # outward for CCW
    support = np.sum(normals * v, axis=1)
    return Polygon2D(normals / support[:, None])


def curl_cycle(cycle) -> float:
    """Accumulated advantage around a closed loop of latent points.

    Σ_j disc(y_{j+1}, y_j) over the closed cycle; equals −2 times the
    shoelace signed area, so clockwise loops (the direction advantage
    circulates) give positive curl and collinear cycles give zero.
    """
    y = np.atleast_2d(np.asarray(cycle, dtype=float))
    nxt = np.roll(y, -1, axis=0)
    return float(np.sum(nxt[:, 0] * y[:, 1] - nxt[:, 1] * y[:, 0]))


def period_estimate(traj, theta_star):
    """Orbit period from winding around an equilibrium (planar flows only).

    Accumulates the continuous angle of θ(t) − θ* and reports the
    (interpolated) time to complete the first full turn, i.e. the time
    between successive crossings of the ray through θ(0).  None when less
    than one full revolution was recorded.
    """
    theta_star = np.asarray(theta_star, dtype=float)
    if traj.thetas.shape[1] != 2:
        raise OutOfDomain("period estimation is implemented for r = 2 only")
    rel = traj.thetas - theta_star[None, :]
    angles = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
    total = angles - angles[0]
    crossed = np.flatnonzero(np.abs(total) >= 2.0 * np.pi)
    if crossed.size == 0:
        return None
    k = crossed[0]
    prev, cur = abs(total[k - 1]), abs(total[k])
    frac = (2.0 * np.pi - prev) / (cur - prev)
    return float(traj.times[k - 1] + frac * (traj.times[k] - traj.times[k - 1]))


def boundary_proximity(points_or_embedding, ybar) -> float:
    """Distance from a planar centroid to the hull boundary (+ inside).

    Accepts raw points, a ParticleCloud, or an embedding (whose coords are
    used).  Negative values mean the point is outside the hull.
    """
    obj = points_or_embedding
    if isinstance(obj, ParticleCloud):
        pts = obj.points
    elif hasattr(obj, "coords"):
        pts = obj.coords
    else:
        pts = np.asarray(obj, dtype=float)
    if pts.shape[1] != 2:
        raise OutOfDomain("boundary proximity is implemented for r = 2 only")
    hull = convex_hull_2d(pts)
    ybar = np.asarray(ybar, dtype=float)
    clearances = _edge_clearances(hull, ybar)
    if np.all(clearances >= 0):
        return float(np.min(clearances))
    # outside: true Euclidean distance to the boundary polyline
    nxt = np.roll(hull, -1, axis=0)
    best = np.inf
    for a, b in zip(hull, nxt):
        e = b - a
        tt = np.clip(np.dot(ybar - a, e) / np.dot(e, e), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(ybar - (a + tt * e))))
    return -best
