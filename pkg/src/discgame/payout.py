"""Skew-symmetric payout matrices for finite symmetric zero-sum games.

A :class:`PayoutMatrix` couples an n-by-n skew-symmetric matrix of pairwise
advantages with agent labels and a reference weight vector (a probability
distribution over agents).  All operations treat the matrix as immutable.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    LengthMismatch,
    NonFinite,
    NonSquare,
    NotDistribution,
    NotSkew,
)
from . import serialize

DEFAULT_SKEW_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-12
DISTRIBUTION_TOL = 1e-10


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a skew-symmetry check."""

    max_violation: float
    ok: bool


def _as_square(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix contains non-finite entries")
    return m


def validate_skew(entries, skew_tol: float = DEFAULT_SKEW_TOL) -> ValidationReport:
    """Check that ``entries + entries.T`` vanishes to relative tolerance.

    The violation is compared against ``skew_tol * max(1, max|entries|)`` so
    the tolerance is relative for large payouts and absolute near zero.
    """
    m = _as_square(entries)
    violation = float(np.max(np.abs(m + m.T))) if m.size else 0.0
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return ValidationReport(max_violation=violation, ok=violation <= skew_tol * scale)


@dataclass(frozen=True)
class PayoutMatrix:
    """Skew-symmetric payouts with labels and a reference measure.

    Parameters
    ----------
    entries : (n, n) array
        Pairwise payouts; ``entries[i, j]`` is the advantage of agent i over
        agent j.  Must be skew-symmetric within ``skew_tol``.
    labels : sequence of str, optional
        Agent identifiers; defaults to ``agent_000`` style names.
    weights : (n,) array, optional
        Nonnegative reference weights summing to 1.  Defaults to uniform.
        Agents with zero weight stay in the labels but are excluded from the
        embedding operator (marked "not in support").
    """

    entries: np.ndarray
    labels: tuple
    weights: np.ndarray

    def __init__(self, entries, labels=None, weights=None,
                 skew_tol: float = DEFAULT_SKEW_TOL):
        m = _as_square(entries)
        report = validate_skew(m, skew_tol)
        if not report.ok:
            raise NotSkew(
                f"matrix is not skew-symmetric: violation {report.max_violation:.3e} "
                f"exceeds tolerance (pass it through skew_symmetrize first)"
            )
        n = m.shape[0]
        if labels is None:
            labels = tuple(f"agent_{i:03d}" for i in range(n))
        else:
            labels = tuple(str(l) for l in labels)
            if len(labels) != n:
                raise LengthMismatch(f"{len(labels)} labels for {n} agents")
        if weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (n,):
                raise LengthMismatch(f"weights shape {w.shape} for {n} agents")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise NotDistribution("weights must be finite and nonnegative")
            if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise NotDistribution(f"weights sum to {w.sum()!r}, not 1")
        m = m.copy()
        m.flags.writeable = False
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def in_support(self) -> np.ndarray:
        """Boolean mask of agents carried by the reference measure."""
        return self.weights > 0


def skew_symmetrize(entries, labels=None, weights=None) -> PayoutMatrix:
    """Project a raw square matrix onto its skew part ``(M - M.T) / 2``.

    Idempotent: applying it to an already-skew matrix returns the same
    entries.  Use this to clean noisy empirical payout tables before
    embedding.
    """
    m = _as_square(entries)
    return PayoutMatrix(0.5 * (m - m.T), labels=labels, weights=weights)


def _check_distribution(p, n, name):
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise LengthMismatch(f"{name} has shape {p.shape}, expected ({n},)")
    if np.any(p < 0):
        raise NotDistribution(f"{name} has negative entries")
    if abs(p.sum() - 1.0) > DISTRIBUTION_TOL:
        raise NotDistribution(f"{name} sums to {p.sum()!r}, not 1")
    return p


def mixed_payout(payout: PayoutMatrix, p, q) -> float:
    """Expected payout ``p @ F @ q`` of mixed strategy p against q.

    Antisymmetric in (p, q) because F is skew-symmetric.
    """
    p = _check_distribution(p, payout.n, "p")
    q = _check_distribution(q, payout.n, "q")
    return float(p @ payout.entries @ q)


def read_payout_csv(path, weights_path=None, auto_symmetrize: bool = False,
                    skew_tol: float = DEFAULT_SKEW_TOL) -> PayoutMatrix:
    """Load a payout matrix from CSV.

    The file holds a square numeric block, optionally preceded by one header
    row of labels.  ``weights_path`` points at a single-column CSV of
    reference weights.  Matrices that fail the skew check are rejected unless
    ``auto_symmetrize`` is set.
    """
    with open(path) as fh:
        first = fh.readline().strip()
        labels = None
        rows = []
        cells = first.split(",")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            labels = [c.strip() for c in cells]
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(c) for c in line.split(",")])
    entries = np.asarray(rows, dtype=float)
    weights = None
    if weights_path is not None:
        weights = np.loadtxt(weights_path, delimiter=",", ndmin=1)
    if auto_symmetrize:
        return skew_symmetrize(entries, labels=labels, weights=weights)
    return PayoutMatrix(entries, labels=labels, weights=weights, skew_tol=skew_tol)


def write_payout_csv(payout: PayoutMatrix, path, weights_path=None) -> None:
    """Write the matrix (with a label header) and optionally the weights."""
    with open(path, "w") as fh:
        fh.write(",".join(payout.labels) + "\n")
        for row in payout.entries:
            fh.write(",".join(serialize.fmt(v) for v in row) + "\n")
    if weights_path is not None:
        with open(weights_path, "w") as fh:
            for w in payout.weights:
                fh.write(serialize.fmt(w) + "\n")
