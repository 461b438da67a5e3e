"""Exception hierarchy shared by all betageom modules."""


class BetaGeomError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BetaGeomError):
    """A parameter lies outside the admissible range of an operation."""


class InvalidDecay(DomainError):
    """Nonpositive decay rate passed to the real-line integrator."""


class InvalidExponent(DomainError):
    """Endpoint exponent <= -1 passed to the interval integrator."""


class ConvergenceDomain(DomainError):
    """Integral representation does not converge for these parameters."""


class NonConvergence(BetaGeomError):
    """Quadrature failed to reach the requested tolerance."""


class ResidualError(NonConvergence):
    """A mathematically guaranteed identity (e.g. a real-valued result)
    failed to hold within its hard tolerance."""


class SubsetBlowup(BetaGeomError):
    """Subset enumeration would exceed the hard cap of 20 indices."""


class DegenerateInput(BetaGeomError):
    """Numerically degenerate geometric input (zero vector, rank-deficient
    span) where general position is required."""
