"""Exception types raised by lorext."""


class LorextError(ValueError):
    """Base class for every input or domain error raised by the package."""


class ZeroOffDiagonal(LorextError):
    pass


class AsymmetricDistance(LorextError):
    pass


class InvalidExponent(LorextError):
    pass


class InvalidPhi(LorextError):
    pass


class ExponentOutOfRange(LorextError):
    pass


class SplitMismatch(LorextError):
    pass


class AlphaOutOfRange(LorextError):
    pass


class NotAGrid(LorextError):
    pass


class BudgetZero(LorextError):
    pass


class NupTooSmall(LorextError):
    """A supplied operator-norm certificate is smaller than an observed ratio."""


class ScalingMismatch(LorextError):
    pass


class Q0OutOfRange(LorextError):
    pass


class DomainError(LorextError):
    pass


class ClassViolation(LorextError):
    pass


class GridTooCoarse(LorextError):
    pass
