"""
Sample Enumeration
Exact expectations over the product space Z^n by odometer enumeration
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

import numpy as np

from src.core.config import get_config
from src.core.errors import EnumerationCapExceeded
from src.core.events import EventType, publish
from src.measure.logspace import LogAccumulator, SignedLogAccumulator
from src.problem.types import FiniteDistribution, LearningProblem

logger = logging.getLogger(__name__)

SampleFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class ProductMeasure:
    """
    The n-fold product of a per-outcome weight vector.

    Covers P^n (the usual case), Q_f0^n (entropified expectations) and the
    base measure nu^n (Shtarkov-style integrals of densities).
    """
    log_weights: np.ndarray
    n: int
    log_nu: np.ndarray

    @property
    def n_outcomes(self) -> int:
        return self.log_weights.size

    @property
    def masses(self) -> np.ndarray:
        return np.exp(self.log_weights)

    @classmethod
    def of_problem(cls, problem: LearningProblem, n: Optional[int] = None) -> 'ProductMeasure':
        return cls(problem.p_true.log_masses, problem.n if n is None else int(n), problem.space.log_nu)

    @classmethod
    def of_masses(cls, masses: Union[np.ndarray, FiniteDistribution], n: int,
                  log_nu: Optional[np.ndarray] = None) -> 'ProductMeasure':
        if isinstance(masses, FiniteDistribution):
            log_weights = masses.log_masses
        else:
            with np.errstate(divide='ignore'):
                log_weights = np.log(np.asarray(masses, dtype=float))
        if log_nu is None:
            log_nu = np.zeros(log_weights.size)
        return cls(log_weights, int(n), log_nu)

    @classmethod
    def base_measure(cls, problem: LearningProblem, n: Optional[int] = None) -> 'ProductMeasure':
        log_nu = problem.space.log_nu
        return cls(log_nu, problem.n if n is None else int(n), log_nu)


MeasureLike = Union[LearningProblem, ProductMeasure]


def as_measure(source: MeasureLike) -> ProductMeasure:
    if isinstance(source, ProductMeasure):
        return source
    return ProductMeasure.of_problem(source)


@dataclass
class SampleChunk:
    """A contiguous block of the enumeration"""
    samples: np.ndarray        # (m, n) outcome indices
    log_weight: np.ndarray     # (m,) log product weight
    log_nu: np.ndarray         # (m,) log product base-measure weight

    def __len__(self):
        return self.samples.shape[0]


class SampleEnumerator:
    """
    Odometer over Z^n, last index fastest, yielded in chunks

    Every sample comes with its log product weight and log product nu weight.
    """

    def __init__(self, source: MeasureLike, cap: Optional[int] = None,
                 chunk_size: Optional[int] = None):
        self.measure = as_measure(source)
        config = get_config()
        self.cap = int(cap if cap is not None else config.get('settings', 'engine.exact_cap'))
        self.chunk_size = int(chunk_size if chunk_size is not None else config.get('settings', 'engine.chunk_size'))
        self.size = self.measure.n_outcomes ** self.measure.n
        if self.size > self.cap:
            raise EnumerationCapExceeded(self.size, self.cap)

    def __len__(self):
        return self.size

    def chunks(self) -> Iterator[SampleChunk]:
        k, n = self.measure.n_outcomes, self.measure.n
        shape = (k,) * n
        publish(EventType.ENUMERATION_STARTED, states=self.size, n=n)
        logger.debug("enumerating %d samples (|Z|=%d, n=%d)", self.size, k, n)
        for start in range(0, self.size, self.chunk_size):
            stop = min(start + self.chunk_size, self.size)
            samples = np.stack(np.unravel_index(np.arange(start, stop), shape), axis=1)
            yield SampleChunk(
                samples=samples,
                log_weight=self.measure.log_weights[samples].sum(axis=1),
                log_nu=self.measure.log_nu[samples].sum(axis=1),
            )

    def materialize(self) -> SampleChunk:
        """All samples at once"""
        parts = list(self.chunks())
        return SampleChunk(
            samples=np.concatenate([c.samples for c in parts]),
            log_weight=np.concatenate([c.log_weight for c in parts]),
            log_nu=np.concatenate([c.log_nu for c in parts]),
        )


def exact_expectation(source: MeasureLike, g: SampleFunction, cap: Optional[int] = None) -> float:
    """
    Exact expectation of a sample function over the product measure

    Args:
        source: problem (uses P^n) or explicit product measure
        g: vectorized function, (m, n) samples -> (m,) reals
        cap: enumeration cap (config default 10^7)

    Returns:
        sum_{z^n} P(z^n) g(z^n), accumulated in signed log domain

    Raises:
        EnumerationCapExceeded: |Z|^n above the cap
    """
    total = SignedLogAccumulator()
    for chunk in SampleEnumerator(source, cap=cap).chunks():
        total.add(chunk.log_weight, g(chunk.samples))
    return total.value


def exact_log_expectation(source: MeasureLike, log_g: SampleFunction, cap: Optional[int] = None) -> float:
    """log sum_{z^n} P(z^n) exp(log_g(z^n)) without leaving the log domain"""
    total = LogAccumulator()
    for chunk in SampleEnumerator(source, cap=cap).chunks():
        total.add(chunk.log_weight + log_g(chunk.samples))
    return total.log_total
