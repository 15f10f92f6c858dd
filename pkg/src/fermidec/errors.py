"""Exception hierarchy.

``StructuralError`` covers malformed inputs (shapes, indices, symmetry);
``PhysicsContractError`` covers inputs that are well formed but violate a
physical precondition (non-stationary bath, marginal steady state, ...);
``ToleranceError`` is raised when a self-check exceeds its numeric tolerance.
"""


class FermidecError(Exception):
    """Base class for all package errors."""


class StructuralError(FermidecError, ValueError):
    pass


class DomainError(FermidecError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class PhysicsContractError(FermidecError):
    pass


class NonStationaryBathError(PhysicsContractError):
    pass


class MarginalSteadyStateError(PhysicsContractError):
    """The generator is not Hurwitz stable, so the steady state is not unique.

    The offending eigenvalues are kept on ``spectrum``.
    """

    def __init__(self, message, spectrum=None):
        super().__init__(message)
        self.spectrum = spectrum


class EmptyGroundSpaceError(PhysicsContractError):
    pass


class ToleranceError(FermidecError, ArithmeticError):
    pass


class InvariantError(ToleranceError):
    """An inequality that must hold mathematically was found violated."""
