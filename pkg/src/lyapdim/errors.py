"""Exception types shared across the toolkit."""


class LyapdimError(Exception):
    """Base class for toolkit errors."""


class NonFiniteState(LyapdimError):
    """Integration produced a non-finite or runaway state (|component| > 1e6)."""

    def __init__(self, message, state=None, t=None):
        super().__init__(message)
        self.state = state
        self.t = t


class HorizonTooShort(LyapdimError):
    """Exponent-accumulation horizon shorter than 100 reorthonormalization intervals."""


class OverflowRisk(LyapdimError):
    """Fundamental-matrix log spread beyond what a raw double matrix could hold."""


class RhoUndefined(LyapdimError):
    """sigma*r + (sigma - b)*(b - 1) <= 0: the similarity scaling rho does not exist."""


class NoCertificate(LyapdimError):
    """A bracket came up empty during certificate construction."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        #: (name, low, high) of the empty bracket, when known.
        self.bracket = bracket


class DegenerateQuadratic(LyapdimError):
    """Leading coefficient of the gamma2 polynomial is zero (linear case)."""

    def __init__(self, message, feasible):
        super().__init__(message)
        #: True when the degenerate inequality is still satisfiable for gamma2 > 0.
        self.feasible = feasible
