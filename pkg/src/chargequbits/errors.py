"""Exception hierarchy shared by all modules."""


class ChargeQubitError(ValueError):
    """Base class for every error raised by this package."""


class InvalidParameterError(ChargeQubitError):
    pass


class DegenerateDenominatorError(ChargeQubitError):
    pass


class NotHermitianError(ChargeQubitError):
    pass


class NotPSDError(ChargeQubitError):
    pass


class NotDensityMatrixError(ChargeQubitError):
    pass


class NotConvergedError(ChargeQubitError):
    pass


class NegativeTimeError(ChargeQubitError):
    pass


class StepTooLargeError(ChargeQubitError):
    pass


class TruncationError(ChargeQubitError):
    """Kraus series tail exceeds the allowed bound at the requested order."""


class InvalidAxisError(ChargeQubitError):
    pass


class ConfigError(ChargeQubitError):
    pass
