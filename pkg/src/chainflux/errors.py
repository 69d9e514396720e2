"""Exception types shared across the package."""


class ChainFluxError(Exception):
    """Base class for all package errors."""


class SpecError(ChainFluxError):
    """A chain, bath, or configuration specification is invalid."""


class ShapeError(ChainFluxError):
    """Operator dimensions do not match."""


class EmptyChainError(ChainFluxError):
    """A tensor product over zero sites was requested."""


class NonUniqueSteadyStateError(ChainFluxError):
    """The generator has more than one numerical zero mode."""


class NoConvergenceError(ChainFluxError):
    """An iterative solve did not reach its target residual."""


class NumericalError(ChainFluxError):
    """A computed quantity violates a numerical invariant."""


class DomainError(ChainFluxError):
    """A value lies outside the physically meaningful domain."""
