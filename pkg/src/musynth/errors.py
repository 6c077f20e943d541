"""Exception hierarchy shared by every module."""


class MusError(Exception):
    """Base class for all errors raised by musynth."""


class DimensionError(MusError, ValueError):
    pass


class HermiticityError(MusError, ValueError):
    pass


class NormalizationError(MusError, ValueError):
    pass


class DegenerateInputError(MusError, ValueError):
    pass


class SignAmbiguousError(MusError, ValueError):
    pass


class FormatError(MusError, ValueError):
    pass


class ResolutionError(MusError, ValueError):
    pass


class ConvergenceError(MusError, RuntimeError):
    """Iterative solver gave up; ``best_residual`` is the smallest residual seen."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual
