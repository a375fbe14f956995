"""Exception and warning types raised by the numerical routines."""


class HybridOMError(Exception):
    """Base class for all numerical failures in this package."""


class NonConvergence(HybridOMError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"steady state did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class SingularDenominator(HybridOMError):
    def __init__(self, x=None, where=""):
        self.x = x
        msg = "denominator vanishes"
        if where:
            msg += f" in {where}"
        if x is not None:
            msg += f" at x = {x!r}"
        super().__init__(msg)


class UndefinedNormalization(HybridOMError):
    """A normalized output was requested against a zero probe amplitude."""


class NotSettled(HybridOMError):
    def __init__(self, x, drift):
        self.x = x
        self.drift = drift
        super().__init__(f"oscillation at x = {x!r} not settled (half-window drift {drift:.3e})")


class StepTooLarge(HybridOMError):
    def __init__(self, x, change):
        self.x = x
        self.change = change
        super().__init__(f"halving dt at x = {x!r} changed amplitudes by {change:.3e}")


class ValidationError(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.errors))


class GridTooCoarse(UserWarning):
    """Neighbouring extrema could not be separated on the sweep grid."""
