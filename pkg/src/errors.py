"""Exception hierarchy of the laboratory.

``ValidationError`` marks bad input (exit code 2 from the command line),
``NumericalError`` marks a computation that ran and failed (exit code 3).
"""


class ThreeWaveError(Exception):
    pass


class ValidationError(ThreeWaveError, ValueError):
    pass


class NumericalError(ThreeWaveError, ArithmeticError):
    pass


class GridError(ValidationError):
    pass


class SnapshotError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class StabilityCapError(ValidationError):
    def __init__(self, dt, cap):
        super().__init__("dt exceeds stability cap: dt={0:.6g} > {1:.6g}".format(dt, cap))
        self.dt = dt
        self.cap = cap


class OutsideXiError(ValidationError):
    def __init__(self, message="outside Ξ: potential energy vanishes"):
        super().__init__(message)


class SpanError(ValidationError):
    pass


class ConvergenceError(NumericalError):
    pass


class CollapseError(NumericalError):
    def __init__(self, message="collapse to zero"):
        super().__init__(message)


class NegativePartError(NumericalError):
    pass


class BracketError(NumericalError):
    pass


class NormalizationError(NumericalError):
    def __init__(self, energy, message=None):
        super().__init__(message or "cannot normalize: E(u0) = {0:.6g} <= 0".format(energy))
        self.energy = energy


class BlowUpError(NumericalError):
    def __init__(self, time, reason=""):
        message = "blow-up detected at t={0:.6g}".format(time)
        if reason:
            message += " ({0})".format(reason)
        super().__init__(message)
        self.time = time
