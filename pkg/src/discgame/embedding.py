"""Spectral embedding of skew-symmetric payouts into paired planar coordinates.

The weighted payout operator ``A = D^{1/2} F D^{1/2}`` (D the diagonal of
reference weights) is real skew-symmetric, so ``i A`` is Hermitian and its
spectrum splits into pairs ``±ω``.  Each kept pair contributes one plane of
coordinates ``y = sqrt(2 ω) [Re φ, Im φ]`` built from the eigenvector with
eigenvalue ``+iω`` of A, and the payout decomposes exactly as a sum of cross
products over planes:

    F[i, j] = Σ_k  y1_k(i) y2_k(j) − y2_k(i) y1_k(j).

The sqrt(2 ω) scale is forced by requiring this identity to hold exactly
(the conjugate eigenvalue pair contributes the factor 2).
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateBasis,
    EigenFailure,
    IndexOutOfRange,
    NotDistribution,
    OddRank,
    RankTooLarge,
    ZeroOperator,
)
from .payout import PayoutMatrix
from . import serialize

DEFAULT_RANK_TOL = 1e-10
TIE_TOL = 1e-10
ROTATION_TIE_TOL = 1e-12


@dataclass(frozen=True)
class DiscEmbedding:
    """Latent coordinates of an embedded payout matrix.

    Attributes
    ----------
    rank : int
        Even number of latent coordinates kept (2 per plane).
    omegas : (rank/2,) array
        Block frequencies, strictly positive and non-increasing.
    coords : (n, rank) array
        Row i holds agent i's latent coordinates, consecutive pairs of
        columns forming one plane.
    weights : (n,) array
        Copy of the reference measure the embedding was computed under.
    shares : (rank/2,) array
        Fraction of total payout variance carried by each plane.
    residual : float
        Squared weighted reconstruction error of everything discarded.
    labels : tuple of str
    in_support : (n,) bool array
        False for zero-weight agents; their coordinates are extensions of
        the embedding functions, not part of the operator.
    """

    rank: int
    omegas: np.ndarray
    coords: np.ndarray
    weights: np.ndarray
    shares: np.ndarray
    residual: float
    labels: tuple
    in_support: np.ndarray

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def n_blocks(self) -> int:
        return self.rank // 2

    def block(self, k: int) -> np.ndarray:
        """Coordinates of plane k as an (n, 2) view."""
        return self.coords[:, 2 * k:2 * k + 2]

    def tie_groups(self, tol: float = TIE_TOL):
        """Groups of block indices whose frequencies are equal within tol.

        Rotations mixing the planes inside a group leave the payout
        invariant, so only blocks in singleton groups have canonical axes.
        """
        groups, current = [], [0]
        scale = self.omegas[0] if self.n_blocks else 1.0
        for k in range(1, self.n_blocks):
            if abs(self.omegas[k] - self.omegas[current[-1]]) <= tol * scale:
                current.append(k)
            else:
                groups.append(current)
                current = [k]
        if self.n_blocks:
            groups.append(current)
        return groups


def _freeze(e: DiscEmbedding) -> DiscEmbedding:
    for arr in (e.omegas, e.coords, e.weights, e.shares, e.in_support):
        arr.flags.writeable = False
    return e


def _variance_shares(omegas, residual):
    total = float(np.sum(omegas**2)) + residual / 2.0
    return omegas**2 / total if total > 0 else np.zeros_like(omegas)


def embed(payout: PayoutMatrix, rank_tol: float = DEFAULT_RANK_TOL) -> DiscEmbedding:
    """Compute the full-rank planar embedding of a payout matrix.

    Eigen-pairs with frequency below ``rank_tol`` times the largest
    frequency are discarded (this always removes the unpaired zero mode of
    an odd-dimensional operator).  Zero-weight agents are excluded from the
    operator; their coordinates are filled in afterwards by applying the
    integral operator to the embedding functions, which reproduces their
    payouts exactly whenever those payouts lie in the embedded span.

    Raises
    ------
    ZeroOperator
        If every frequency is below tolerance.
    EigenFailure
        If the eigensolver does not converge.
    """
    w = payout.weights
    support = payout.in_support
    f_sup = payout.entries[np.ix_(support, support)]
    w_sup = w[support]
    if f_sup.size == 0 or not np.any(f_sup):
        raise ZeroOperator("payout operator is zero on the supported agents")
    sqrt_w = np.sqrt(w_sup)
    a = sqrt_w[:, None] * f_sup * sqrt_w[None, :]
    try:
        # Hermitian route: eig(iA) is real, pairs (−ω, +ω); the eigenvector
        # at −ω is the +iω eigenvector of A itself.
        eigvals, eigvecs = np.linalg.eigh(1j * a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    omega_max = float(np.max(np.abs(eigvals)))
    if omega_max <= 0:
        raise ZeroOperator("all frequencies vanish")
    keep = np.flatnonzero(eigvals < -rank_tol * omega_max)  # ascending: largest ω first
    if keep.size == 0:
        raise ZeroOperator("all frequencies fall below rank_tol")
    omegas = -eigvals[keep]
    discarded = eigvals[(eigvals < 0) & (eigvals >= -rank_tol * omega_max)]
    residual = 2.0 * float(np.sum(discarded**2))

    n = payout.n
    r = 2 * keep.size
    coords = np.zeros((n, r))
    phi = eigvecs[:, keep] / sqrt_w[:, None]
    scale = np.sqrt(2.0 * omegas)
    y1_sup = scale[None, :] * phi.real
    y2_sup = scale[None, :] * phi.imag
    coords[np.ix_(support, 2 * np.arange(keep.size))] = y1_sup
    coords[np.ix_(support, 2 * np.arange(keep.size) + 1)] = y2_sup

    if not np.all(support):
        # Extend to zero-weight agents through the operator itself:
        # y1(x) = (1/ω) Σ_j w_j F[x, j] y2(j),  y2(x) = −(1/ω) Σ_j w_j F[x, j] y1(j).
        f_out = payout.entries[np.ix_(~support, support)]
        fw = f_out * w_sup[None, :]
        coords[np.ix_(~support, 2 * np.arange(keep.size))] = (fw @ y2_sup) / omegas
        coords[np.ix_(~support, 2 * np.arange(keep.size) + 1)] = -(fw @ y1_sup) / omegas

    emb = DiscEmbedding(
        rank=r,
        omegas=omegas,
        coords=coords,
        weights=w.copy(),
        shares=_variance_shares(omegas, residual),
        residual=residual,
        labels=payout.labels,
        in_support=support.copy(),
    )
    return canonical_rotation(emb)


def canonical_rotation(emb: DiscEmbedding) -> DiscEmbedding:
    """Fix the free rotation of each plane deterministically.

    Within every pair of columns, rotate so that the supported agent with
    the largest norm in that plane (smallest index on ties) lands on the
    positive first axis.  Cross products, and therefore all reconstructed
    payouts, are unchanged.  Idempotent.
    """
    coords = emb.coords.copy()
    sup = np.flatnonzero(emb.in_support)
    for k in range(emb.n_blocks):
        block = coords[:, 2 * k:2 * k + 2]
        norms = np.linalg.norm(block[sup], axis=1)
        top = float(norms.max())
        if top == 0.0:
            continue
        anchor = sup[np.flatnonzero(norms >= top - ROTATION_TIE_TOL * top)[0]]
        u, v = block[anchor]
        norm = float(np.hypot(u, v))
        c, s = u / norm, v / norm
        rot = np.array([[c, s], [-s, c]])  # proper rotation, det +1
        coords[:, 2 * k:2 * k + 2] = block @ rot.T
        coords[anchor, 2 * k + 1] = 0.0
    return _freeze(DiscEmbedding(
        rank=emb.rank, omegas=emb.omegas.copy(), coords=coords,
        weights=emb.weights.copy(), shares=emb.shares.copy(),
        residual=emb.residual, labels=emb.labels,
        in_support=emb.in_support.copy(),
    ))


def truncate(emb: DiscEmbedding, r_new: int) -> DiscEmbedding:
    """Keep the leading ``r_new / 2`` planes.

    This is the best rank-``r_new`` approximation in the weighted Frobenius
    norm; the squared error it adds is exactly ``2 Σ ω_k²`` over the dropped
    blocks, which is accumulated into ``residual``.
    """
    if r_new % 2 != 0 or r_new <= 0:
        raise OddRank(f"rank must be a positive even integer, got {r_new}")
    if r_new > emb.rank:
        raise RankTooLarge(f"requested rank {r_new} exceeds rank {emb.rank}")
    kept = r_new // 2
    residual = emb.residual + 2.0 * float(np.sum(emb.omegas[kept:] ** 2))
    omegas = emb.omegas[:kept].copy()
    return _freeze(DiscEmbedding(
        rank=r_new, omegas=omegas, coords=emb.coords[:, :r_new].copy(),
        weights=emb.weights.copy(), shares=_variance_shares(omegas, residual),
        residual=residual, labels=emb.labels, in_support=emb.in_support.copy(),
    ))


def reconstruct(emb: DiscEmbedding, i: int, j: int) -> float:
    """Payout of agent i against agent j implied by the embedding."""
    n = emb.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexOutOfRange(f"indices ({i}, {j}) outside 0..{n - 1}")
    yi, yj = emb.coords[i], emb.coords[j]
    return float(np.sum(yi[0::2] * yj[1::2] - yi[1::2] * yj[0::2]))


def reconstruct_matrix(emb: DiscEmbedding) -> np.ndarray:
    """All pairwise reconstructed payouts as an (n, n) skew matrix."""
    y1, y2 = emb.coords[:, 0::2], emb.coords[:, 1::2]
    return y1 @ y2.T - y2 @ y1.T


def variance_shares(emb: DiscEmbedding) -> np.ndarray:
    """Fraction of payout variance carried by each plane.

    ``share_k = ω_k² / (Σ_j ω_j² + residual / 2)``: non-increasing, and the
    total over kept planes is at most 1 with the deficit equal to the
    truncated tail.
    """
    return _variance_shares(emb.omegas, emb.residual)


@dataclass(frozen=True)
class EquivalenceClasses:
    """Partition of agents whose payout rows agree within tolerance."""

    class_of: np.ndarray
    representatives: list
    merged_weights: np.ndarray


def merge_equivalent(payout: PayoutMatrix, merge_tol: float) -> EquivalenceClasses:
    """Group agents whose payout rows differ by at most ``merge_tol``.

    Agents i and j match when ``max_k |F[i,k] − F[j,k]| <= merge_tol``; the
    partition is the transitive closure of pairwise matches.  Equivalent
    agents receive identical embedding coordinates, so merging them (with
    summed weights) leaves the embedding unchanged.
    """
    f = payout.entries
    n = payout.n
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        diffs = np.max(np.abs(f[i + 1:] - f[i]), axis=1) if i + 1 < n else []
        for off, d in enumerate(diffs):
            if d <= merge_tol:
                ri, rj = find(i), find(i + 1 + off)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    roots = [find(i) for i in range(n)]
    representatives = sorted(set(roots))
    index = {r: c for c, r in enumerate(representatives)}
    class_of = np.array([index[r] for r in roots])
    merged = np.zeros(len(representatives))
    np.add.at(merged, class_of, payout.weights)
    return EquivalenceClasses(class_of=class_of, representatives=representatives,
                              merged_weights=merged)


def merged_payout(payout: PayoutMatrix, classes: EquivalenceClasses) -> PayoutMatrix:
    """Payout matrix over class representatives with summed weights."""
    reps = classes.representatives
    entries = payout.entries[np.ix_(reps, reps)]
    labels = [payout.labels[r] for r in reps]
    return PayoutMatrix(entries, labels=labels, weights=classes.merged_weights)


def orthonormalize_basis(basis_values, grid_weights, drop_tol: float = 1e-10):
    """Modified Gram-Schmidt under the grid inner product Σ w u v.

    Columns whose post-projection norm falls below ``drop_tol`` are dropped.
    Returns the orthonormal columns actually kept.
    """
    b = np.asarray(basis_values, dtype=float).copy()
    w = np.asarray(grid_weights, dtype=float)
    kept = []
    for j in range(b.shape[1]):
        col = b[:, j].copy()
        for q in kept:
            col -= (w * q) @ col * q
        norm = np.sqrt((w * col) @ col)
        if norm >= drop_tol:
            kept.append(col / norm)
    if not kept:
        raise DegenerateBasis("all basis columns dropped during orthonormalization")
    return np.column_stack(kept)


def basis_project(f_samples, basis_values, grid_weights) -> PayoutMatrix:
    """Project sampled payouts onto a function basis over a quadrature grid.

    ``f_samples`` is the m-by-m table of payouts between grid points,
    ``basis_values`` the m-by-b table of basis functions at those points and
    ``grid_weights`` the quadrature weights (nonnegative, summing to 1).
    The basis is orthonormalized first, the coefficient matrix is
    ``C_ab = Σ_ij w_i w_j b_a(x_i) f(x_i, x_j) b_b(x_j)``, and the output is
    skew-symmetrized to cancel quadrature asymmetry.  Embedding the result
    embeds the projected game.
    """
    f = np.asarray(f_samples, dtype=float)
    w = np.asarray(grid_weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
        raise NotDistribution(
            f"grid weights must be nonnegative and sum to 1, got sum {w.sum()!r}")
    basis = orthonormalize_basis(basis_values, w)
    c = basis.T @ (w[:, None] * f * w[None, :]) @ basis
    return PayoutMatrix(0.5 * (c - c.T))


def to_json(emb: DiscEmbedding, path=None):
    """Serialize to the canonical JSON layout (17 significant digits)."""
    doc = {
        "rank": emb.rank,
        "omegas": emb.omegas,
        "coords": emb.coords,
        "weights": emb.weights,
        "shares": emb.shares,
        "residual": emb.residual,
        "labels": list(emb.labels),
    }
    if path is None:
        return serialize.dumps(doc)
    serialize.dump(doc, path)
    return None


def from_json(source) -> DiscEmbedding:
    """Load an embedding written by :func:`to_json` (path or JSON string)."""
    import json
    import os

    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        doc = serialize.load(source)
    else:
        doc = json.loads(source)
    omegas = np.asarray(doc["omegas"], dtype=float)
    residual = float(doc["residual"])
    weights = np.asarray(doc["weights"], dtype=float)
    return _freeze(DiscEmbedding(
        rank=int(doc["rank"]),
        omegas=omegas,
        coords=np.asarray(doc["coords"], dtype=float),
        weights=weights,
        shares=np.asarray(doc["shares"], dtype=float),
        residual=residual,
        labels=tuple(doc["labels"]),
        in_support=weights > 0,
    ))
