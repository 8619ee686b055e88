"""Exception types shared across the package."""


class DiscGameError(Exception):
    """Base class for all errors raised by this package."""


class NonSquare(DiscGameError):
    """Matrix input is not square."""


class NonFinite(DiscGameError):
    """Input contains NaN or infinite entries."""


class NotSkew(DiscGameError):
    """Matrix violates skew symmetry beyond tolerance."""


class NotSymmetric(DiscGameError):
    """Matrix expected to be symmetric is not."""


class LengthMismatch(DiscGameError):
    """Vector length does not match the number of agents."""


class NotDistribution(DiscGameError):
    """Vector is not a probability distribution (negative or does not sum to 1)."""


class ZeroOperator(DiscGameError):
    """All frequencies fall below the rank tolerance; nothing to embed."""


class EigenFailure(DiscGameError):
    """The eigenvalue solver did not converge."""


class OddRank(DiscGameError):
    """Requested rank is not even."""


class RankTooLarge(DiscGameError):
    """Requested rank exceeds the available rank."""


class IndexOutOfRange(DiscGameError):
    """Agent index outside the embedded set."""


class DegenerateBasis(DiscGameError):
    """Every basis column was dropped during orthonormalization."""


class OutOfDomain(DiscGameError):
    """Argument outside the documented domain of a special function or measure."""


class HamiltonianOverflow(DiscGameError):
    """Hamiltonian evaluation would exceed exp(700)."""


class DegenerateSupport(DiscGameError):
    """Particle cloud does not span the latent space."""


class DimensionMismatch(DiscGameError):
    """Block dimensions of a composite system do not match."""


class NoConvergence(DiscGameError):
    """Fixed-point or Newton iteration failed to converge.

    Carries the last iterate in ``last`` when available.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class StepTooLarge(DiscGameError):
    """Explicit step produced a non-positive weight even after bisection."""


class BlowUp(DiscGameError):
    """Gaussian covariance solution loses positive definiteness."""


class Unattainable(DiscGameError):
    """Requested centroid lies outside the attainable moment region."""


class NotEquilibrium(DiscGameError):
    """Point passed as an equilibrium has a non-negligible gradient."""


class OriginNotInterior(DiscGameError):
    """Polygon does not strictly contain the origin."""


class DegeneratePoints(DiscGameError):
    """Point set is affinely degenerate.

    ``deficient_directions`` spans the orthogonal complement of the points'
    affine span.
    """

    def __init__(self, message, deficient_directions=None):
        super().__init__(message)
        self.deficient_directions = deficient_directions
