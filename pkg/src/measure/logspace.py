"""
Log-domain Accumulation
Signed log-sum-exp accumulators for sums of weighted terms
"""

import math

import numpy as np
from scipy.special import logsumexp


def _logsumexp(values: np.ndarray) -> float:
    values = values[values > -np.inf]
    if values.size == 0:
        return -math.inf
    return float(logsumexp(values))


def log_add(a: float, b: float) -> float:
    return float(np.logaddexp(a, b))


def log_sub(a: float, b: float) -> float:
    """log(e^a - e^b) for a >= b"""
    if b == -math.inf:
        return a
    if b >= a:
        return -math.inf
    return a + math.log(-math.expm1(b - a))


class LogAccumulator:
    """Running log(sum_i exp(x_i)) over chunks"""

    def __init__(self):
        self.log_total = -math.inf
        self.terms = 0

    def add(self, log_terms: np.ndarray):
        log_terms = np.asarray(log_terms, dtype=float)
        self.terms += log_terms.size
        if np.any(log_terms == np.inf):
            self.log_total = math.inf
            return
        self.log_total = log_add(self.log_total, _logsumexp(log_terms))

    def merge(self, other: 'LogAccumulator'):
        self.terms += other.terms
        self.log_total = log_add(self.log_total, other.log_total)


class SignedLogAccumulator:
    """
    sum_i w_i * v_i with positive weights given as log w_i and signed values v_i.

    Positive and negative contributions go to separate log accumulators and
    only meet once, in value, so cancellation happens a single time.
    """

    def __init__(self):
        self.positive = LogAccumulator()
        self.negative = LogAccumulator()

    def add(self, log_weights: np.ndarray, values: np.ndarray):
        log_weights = np.asarray(log_weights, dtype=float)
        values = np.asarray(values, dtype=float)
        if np.any(np.isnan(values)):
            raise ValueError("integrand produced NaN")
        live = log_weights > -np.inf
        with np.errstate(divide='ignore'):
            pos = live & (values > 0)
            neg = live & (values < 0)
            self.positive.add(log_weights[pos] + np.log(values[pos]))
            self.negative.add(log_weights[neg] + np.log(-values[neg]))

    def merge(self, other: 'SignedLogAccumulator'):
        self.positive.merge(other.positive)
        self.negative.merge(other.negative)

    @property
    def value(self) -> float:
        a, b = self.positive.log_total, self.negative.log_total
        if a == math.inf and b == math.inf:
            return math.nan
        if a >= b:
            return math.exp(log_sub(a, b)) if a > -math.inf else 0.0
        return -math.exp(log_sub(b, a))


def masked_expectation(masses: np.ndarray, values: np.ndarray) -> np.ndarray:
    """
    Row-wise sum_f masses[f] * values[f] that ignores values where the mass is 0,
    so infinite values outside the support never produce 0 * inf.
    """
    with np.errstate(invalid='ignore'):
        terms = np.where(masses > 0, masses * values, 0.0)
    return terms.sum(axis=-1)
