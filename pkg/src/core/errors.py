"""
Error Types
Exception hierarchy raised by the library; the CLI maps them to exit codes
"""

from typing import Optional, Tuple


class ComplexityError(Exception):
    """Base class for every error raised by this package"""


class MalformedSpec(ComplexityError):
    """A problem, partition or generator description does not parse or is inconsistent"""


class AssumptionViolated(ComplexityError):
    """
    A standing assumption fails on a concrete witness

    Args:
        assumption: "A1", "A2" or "LOGLOSS"
        pair: offending predictor indices (None when not pair-based)
        outcome: offending outcome index
        detail: human-readable explanation
    """

    def __init__(self, assumption: str, pair: Optional[Tuple[int, int]] = None,
                 outcome: Optional[int] = None, detail: str = ""):
        self.assumption = assumption
        self.pair = pair
        self.outcome = outcome
        message = f"{assumption} violated"
        if pair is not None:
            message += f" by predictors {pair[0]} and {pair[1]}"
        if outcome is not None:
            message += f" at outcome {outcome}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class IndexOutOfRange(ComplexityError, IndexError):
    """A predictor or outcome index is outside the problem"""


class EnumerationCapExceeded(ComplexityError):
    """|Z|^n exceeds the configured cap; callers switch to Monte Carlo"""

    def __init__(self, states: int, cap: int):
        self.states = states
        self.cap = cap
        super().__init__(f"{states} samples exceed enumeration cap {cap}")


class BadPartition(ComplexityError):
    """Blocks do not cover the class disjointly, or block-level inputs mismatch"""


class DegeneratePrior(ComplexityError):
    """A prior puts no mass anywhere a posterior can live"""


class AbsoluteContinuityViolated(ComplexityError):
    """Posterior mass on a predictor the prior excludes"""


class DegenerateExcess(ComplexityError):
    """A non-minimizer has zero excess risk but positive second moment"""


class DiameterViolated(ComplexityError):
    """A cell is wider than the radius the requested sigma assumes"""


class PreconditionFailed(ComplexityError):
    """An operation was called outside the regime it certifies"""


class NotLogLoss(ComplexityError):
    """The penalized equalizer path needs a correct log-loss model at eta = 1"""


class EmptyGrid(ComplexityError):
    """An eta grid had no points"""


class DivisionBySupportMismatch(ComplexityError):
    """An entropified density puts mass where P has none"""
