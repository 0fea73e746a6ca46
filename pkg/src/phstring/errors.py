"""Exception hierarchy shared by all modules."""


class PhStringError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveLength(PhStringError, ValueError):
    pass


class PatchOffGrid(PhStringError, ValueError):
    """An actuator patch edge does not coincide with a grid node."""


class BcViolation(PhStringError, ValueError):
    """A field violates the boundary condition an operator relies on."""


class KinkMismatch(PhStringError, ValueError):
    """Equilibrium shape parameters break C1 continuity at the patch start."""


class FrameworkMismatch(PhStringError, TypeError):
    pass


class CflViolation(PhStringError, ValueError):
    pass


class NonFiniteState(PhStringError, FloatingPointError):
    pass


class ConvergenceError(PhStringError, RuntimeError):
    """Fixed-point iteration of an implicit step did not converge."""


class ConfigError(PhStringError, ValueError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


class IoError(PhStringError, OSError):
    """An output file could not be produced."""


class AuditFailure(PhStringError, AssertionError):
    pass
