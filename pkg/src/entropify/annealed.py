"""
Annealed Expectations
-(1/eta) log E[exp(-eta U)] for finite random variables
"""

import logging

import numpy as np
from scipy.special import logsumexp

from src.core.errors import PreconditionFailed

logger = logging.getLogger(__name__)


def annealed_expectation(values, masses, eta: float) -> float:
    """
    Annealed expectation of a finite random variable

    Args:
        values: value of U per atom
        masses: probability of each atom
        eta: positive rate

    Returns:
        -(1/eta) log sum_i masses[i] exp(-eta values[i]); at most the mean (Jensen)
    """
    if not eta > 0:
        raise PreconditionFailed("annealed expectation needs eta > 0")
    values = np.asarray(values, dtype=float)
    masses = np.asarray(masses, dtype=float)
    live = masses > 0
    result = float(-logsumexp(-eta * values[live], b=masses[live]) / eta)

    if logger.isEnabledFor(logging.DEBUG):
        mean = float(values[live] @ masses[live])
        if result > mean + 1e-12 * max(1.0, abs(mean)):
            logger.warning("annealed expectation %.17g exceeds mean %.17g", result, mean)
    return result
