"""Exception types shared across the package."""


class BiasDynError(Exception):
    """Base class for every error this package raises on purpose."""


class InvalidParameterError(BiasDynError, ValueError):
    """An argument is outside the range an operation supports."""


class ConstructionInfeasibleError(InvalidParameterError):
    """A requested degree sequence cannot be realized as a simple graph."""


class GenerationFailedError(BiasDynError, RuntimeError):
    """Randomized construction exhausted its retry budget without a valid sample."""


class IsolatedAgentError(BiasDynError, ValueError):
    """An agent has neither neighbors nor self-weight, so its update is undefined."""


class BoundaryBiasError(BiasDynError, ValueError):
    """A negatively biased agent sits at an extreme opinion, where its update is undefined."""


class OutOfFamilyError(BiasDynError, ValueError):
    """The requested equilibrium family does not exist for this bias profile."""


class NotAnEquilibriumError(BiasDynError, ValueError):
    """The requested point violates the structural constraints of its family."""


class FamilyUndefinedError(BiasDynError, ValueError):
    """The requested equilibrium family does not exist at this network size."""


class HypothesisViolatedError(BiasDynError, ValueError):
    """Inputs do not satisfy the assumptions the requested analysis relies on."""


class SingularInputError(BiasDynError, ValueError):
    """A matrix argument contains non-finite entries."""
