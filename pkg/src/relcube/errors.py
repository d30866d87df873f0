"""Exception types shared across the package."""


class RelcubeError(Exception):
    """Base class for all relcube errors."""


class UnknownRuleError(RelcubeError):
    """Requested quadrature rule is not in the registry."""


class CrossingLimitsError(RelcubeError):
    """Lower limit exceeds upper limit somewhere on the sampling grid."""


class NonFiniteValueError(RelcubeError):
    """An integrand or limit function produced NaN or infinity."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ToleranceFloorError(RelcubeError):
    """Requested tolerance does not exceed the roundoff floor 4*(b-a)*D*mu."""

    def __init__(self, message, floor):
        super().__init__(message)
        self.floor = floor


class StencilFitError(RelcubeError):
    """No finite-difference stencil fits inside the integration region."""
