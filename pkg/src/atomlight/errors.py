"""Exception hierarchy for atomlight."""


class AtomLightError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(AtomLightError, ValueError):
    """Raised for malformed or out-of-range arguments."""


class InvalidOperation(AtomLightError, ValueError):
    """Raised when an operation does not apply to the given state."""


class TimeStepTooLarge(AtomLightError, ValueError):
    """A per-step probability left its small-step regime; shrink tau."""


class ResonancePole(AtomLightError, ValueError):
    """The detuning sits on an excited-state resonance."""


class DegenerateMeasurement(AtomLightError, ValueError):
    """The measured observable has (numerically) zero variance."""


class UndefinedObservable(AtomLightError, ValueError):
    """An observable is not defined for the current state (e.g. Jx = 0)."""


class NoConvergence(AtomLightError, RuntimeError):
    """Iterative refinement gave up before meeting its tolerance."""


class ConfigError(AtomLightError, ValueError):
    """Configuration file could not be parsed or validated."""
