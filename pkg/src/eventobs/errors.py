"""Exception hierarchy shared by all eventobs modules."""


class EventObsError(Exception):
    """Base class for all errors raised by eventobs."""


class FiniteEscape(EventObsError):
    """A state component became non-finite during a flow step."""


class NoEvent(EventObsError):
    """No trigger-margin crossing was found inside the step."""


class InconsistentJump(EventObsError):
    """A node was asked to jump while its jump condition does not hold."""


class ZenoSuspected(EventObsError):
    """Too many jumps occurred at a single continuous-time instant."""


class BadInput(EventObsError):
    """Malformed numerical input (shapes, symmetry, ...)."""


class InvalidSplit(EventObsError):
    """The splitting constants leave no positive decay rate."""


class ParameterViolation(EventObsError):
    """Triggering parameters violate a stability inequality."""


class DecayUnachievable(EventObsError):
    """The requested decay rate exceeds the observer's certified rate."""


class BadWindow(EventObsError):
    """A metric window does not lie inside the simulated horizon."""


class ConfigError(EventObsError):
    """Scenario configuration could not be parsed or validated."""


class CertificateFailure(EventObsError):
    """A simulated trace violates a Lyapunov or dwell-time check."""
