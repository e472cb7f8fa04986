"""Exception hierarchy shared by all twistkit modules."""


class TwistkitError(Exception):
    """Base class for all errors raised by this package."""


class AdmissibilityError(TwistkitError):
    """A mode spectrum violates strict positivity of the frequencies."""


class ConfigError(TwistkitError):
    """Malformed input: bad config file, mismatched lengths, unknown labels."""


class KindError(TwistkitError):
    """A symmetry of the wrong kind (unitary vs antiunitary) was supplied."""


class CapacityError(TwistkitError):
    """A requested truncated space exceeds the configured storage budget."""


class DomainError(TwistkitError):
    """A numeric argument is outside its mathematical domain (e.g. beta <= 0)."""


class InternalConsistencyError(TwistkitError):
    """A structurally guaranteed property failed numerically."""


class PreconditionError(TwistkitError):
    """A caller-supplied function violates a required boundary condition."""
