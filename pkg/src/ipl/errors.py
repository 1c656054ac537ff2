"""Exception types shared across the package."""


class IplError(Exception):
    """Base class for all package errors."""


class ValidationError(IplError, ValueError):
    """Invalid argument or configuration (CLI exit code 2)."""


class DegenerateCellError(ValidationError):
    """Cell diagonal d1 == d2: the reduced rescaling is undefined."""


class SymmetryViolationError(ValidationError):
    """A matrix that must be symmetric is not."""


class SingularPointError(ValidationError):
    """Evaluation point too close to a singularity of a decoupled equation."""


class MissingStateError(IplError):
    """The requested level does not exist (the absent negative ground level)."""


class MissingPartnerError(IplError):
    """Partner construction degenerates to the input state (nodeless level)."""


class ConsistencyError(IplError):
    """A numerical self-check failed beyond tolerance (CLI exit code 3)."""
