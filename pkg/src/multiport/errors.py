"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MultiportError(Exception):
    """Base class for every error raised by this package."""


class InvalidBlock(MultiportError, ValueError):
    pass


class SingularMatrix(MultiportError, ArithmeticError):
    """A linear system could not be solved at working precision.

    Attributes
    ----------
    condition : float
        Estimated condition number (``inf`` for an exactly zero pivot).
    """

    def __init__(self, message: str = "matrix is singular to working precision",
                 condition: float = float("inf")):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class SingularInteraction(SingularMatrix):
    """The interaction matrix of a connection is singular (resonant or ill-posed)."""


class DeltaLikeSingularity(SingularMatrix):
    """``I - S`` is singular, typically because ``S`` contains ideal delta-connections."""


class SingularUpdate(SingularMatrix):
    """The small Woodbury matrix is singular; fall back to a full re-evaluation."""


class UnknownPortSet(MultiportError, KeyError):
    pass


class PortSetMismatch(MultiportError, ValueError):
    pass


class PortOrderMismatch(MultiportError, ValueError):
    pass


class InvalidReference(MultiportError, ValueError):
    pass


class InvalidEpsilon(MultiportError, ValueError):
    pass


class InvalidReduction(MultiportError, ValueError):
    pass


class InvalidScheme(MultiportError, ValueError):
    pass


class ResonantBond(MultiportError, ArithmeticError):
    pass


class ResonantGraph(SingularMatrix):
    pass


class InvalidGraph(MultiportError, ValueError):
    pass


class InvalidGluing(MultiportError, ValueError):
    pass


class InvalidSubset(MultiportError, ValueError):
    pass


class GenerationFailed(MultiportError, RuntimeError):
    pass
