"""Exception types shared across the package."""


class SpinChainError(Exception):
    """Base class for all package errors."""


class DegenerateModel(SpinChainError):
    """Model violates the structural assumptions (vanishing leading
    coefficients, coincident branch points, non-positive g**2 at infinity)."""


class CriticalSymbol(SpinChainError):
    """A root of the symbol polynomial sits on the unit circle (within
    tolerance); the curve-based asymptotic machinery refuses to run."""


class ConvergenceFailure(SpinChainError):
    """An iterative numerical step failed to reach its residual target."""


class OnBranchCut(SpinChainError):
    """Evaluation point lies on (or too close to) a branch cut."""


class TailTooLarge(SpinChainError):
    """Fourier tail at the requested cutoff exceeds the tolerance; the
    caller must raise max_index."""


class PairingFailure(SpinChainError):
    """Singular values of the correlation matrix failed to pair up."""


class DomainError(SpinChainError):
    """Argument outside the mathematical domain of the operation."""


class ZeroMode(SpinChainError):
    """A finite-chain mode Lambda_k vanished (accidental criticality)."""


class IllConditioned(SpinChainError):
    """Linear system too ill-conditioned to trust (near-degenerate
    branch-point configuration)."""


class QuadratureFailure(SpinChainError):
    """Node doubling did not converge to the requested tolerance."""


class PathRoutingFailure(SpinChainError):
    """Could not route an integration path with the required clearance."""


class TruncationOverflow(SpinChainError):
    """Theta lattice truncation would need too many points (near-degenerate
    imaginary part of the period matrix)."""


class ZeroOnPath(SpinChainError):
    """Theta function vanished along a log-continuation path."""


class GenusMismatch(SpinChainError):
    """Operation requires a specific genus (e.g. the genus-1 series)."""


class NoDegeneratePairs(SpinChainError):
    """No branch-point pairs close enough to the unit circle were found."""


class ConfigError(SpinChainError):
    """Invalid run configuration (CLI layer)."""
