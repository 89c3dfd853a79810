"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) and an
optional ``context`` mapping, so the CLI can print a single-line diagnostic.
"""


class ScatteringError(Exception):
    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def code(self):
        return type(self).__name__

    def diagnostic(self):
        ctx = " ".join(f"{k}={v}" for k, v in sorted(self.context.items()))
        line = f"error code={self.code} message={self.message!r}"
        return f"{line} {ctx}" if ctx else line


class TurningPoint(ScatteringError):
    """E <= V(x) somewhere: the real-phase machinery does not apply."""


class NoPropagatingMode(ScatteringError):
    """E does not exceed one of the asymptotic potential values."""


class UnderBarrier(ScatteringError):
    """Closed form requested outside its over-barrier regime."""


class NonDecayingTail(ScatteringError):
    """Potential has not reached its declared asymptote at a truncation point."""


class AsymmetricAsymptotes(ScatteringError):
    """Constant-wavenumber phase needs V(-inf) == V(+inf)."""


class PhaseDerivativeZero(ScatteringError):
    pass


class ToleranceNotMet(ScatteringError):
    pass


class NonAlternatingProfile(ScatteringError):
    pass


class ConfigError(ScatteringError):
    pass
