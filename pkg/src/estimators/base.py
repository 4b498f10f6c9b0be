"""
Estimator Types
Deterministic (sample -> predictor) and randomized (sample -> distribution
over predictors) estimators, evaluated on batches of samples
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from src.core.constants import MASS_TOL
from src.core.errors import MalformedSpec, PreconditionFailed
from src.problem.risk import outcome_counts
from src.problem.types import LearningProblem

BatchRule = Callable[[np.ndarray], np.ndarray]


class EstimatorKind(Enum):
    ERM = "erm"
    PENALIZED_ERM = "penalized"
    GENERALIZED_BAYES = "bayes"
    TWO_PART_MDL = "two-part"
    MAXIMUM_LIKELIHOOD = "ml"
    DIRAC = "dirac"
    BLOCK_CONDITIONAL = "block-conditional"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class PriorOverClass:
    """Data-independent distribution over predictors (or over partition blocks)"""
    masses: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        if masses.ndim != 1 or masses.size == 0:
            raise MalformedSpec("prior needs a nonempty mass vector")
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise MalformedSpec("prior masses must be finite and nonnegative")
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise MalformedSpec(f"prior masses sum to {masses.sum():.15g}, not 1")
        masses.setflags(write=False)
        object.__setattr__(self, 'masses', masses)

    @property
    def size(self) -> int:
        return self.masses.size

    @property
    def log_masses(self) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return np.log(self.masses)

    @classmethod
    def uniform(cls, size: int) -> 'PriorOverClass':
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def normalized(cls, weights: Sequence[float]) -> 'PriorOverClass':
        weights = np.asarray(weights, dtype=float)
        return cls(weights / weights.sum())


@dataclass(frozen=True, eq=False)
class PenaltyFunction:
    """Real penalty Gamma(f) per predictor"""
    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.ndim != 1 or not np.all(np.isfinite(gamma)):
            raise MalformedSpec("penalty must be a finite vector")
        gamma.setflags(write=False)
        object.__setattr__(self, 'gamma', gamma)

    @classmethod
    def zero(cls, size: int) -> 'PenaltyFunction':
        return cls(np.zeros(size))


class Estimator(ABC):
    """
    Common interface of both estimator kinds.

    An estimator is built from a count rule (a function of per-sample outcome
    counts; all permutation-invariant estimators) or a sample rule (a function
    of the ordered sample). Rules take and return batches.
    """
    deterministic: bool = True

    def __init__(self, n_predictors: int, n_outcomes: int, count_rule: Optional[BatchRule] = None,
                 sample_rule: Optional[BatchRule] = None, kind: EstimatorKind = EstimatorKind.CUSTOM,
                 name: str = ""):
        if count_rule is None and sample_rule is None:
            raise MalformedSpec("estimator needs a count rule or a sample rule")
        self.n_predictors = n_predictors
        self.n_outcomes = n_outcomes
        self._count_rule = count_rule
        self._sample_rule = sample_rule
        self.kind = kind
        self.name = name or kind.value

    @property
    def count_based(self) -> bool:
        return self._count_rule is not None

    def _apply(self, samples: np.ndarray) -> np.ndarray:
        samples = np.atleast_2d(np.asarray(samples, dtype=np.int64))
        if self._count_rule is not None:
            return self._count_rule(outcome_counts(samples, self.n_outcomes))
        return self._sample_rule(samples)

    def _apply_counts(self, counts: np.ndarray) -> np.ndarray:
        if self._count_rule is None:
            raise PreconditionFailed(f"estimator '{self.name}' depends on sample order, not only counts")
        return self._count_rule(np.atleast_2d(counts))

    @abstractmethod
    def posterior(self, samples: np.ndarray) -> np.ndarray:
        """(batch, |F|) masses; Dirac rows for deterministic estimators"""

    @abstractmethod
    def posterior_counts(self, counts: np.ndarray) -> np.ndarray:
        """posterior() for samples given by their outcome counts"""

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


class DeterministicEstimator(Estimator):
    """Map z^n -> predictor index"""
    deterministic = True

    def select(self, samples: np.ndarray) -> np.ndarray:
        """Predictor index per sample of a (batch, n) array"""
        return np.asarray(self._apply(samples), dtype=np.int64)

    def select_counts(self, counts: np.ndarray) -> np.ndarray:
        return np.asarray(self._apply_counts(counts), dtype=np.int64)

    def __call__(self, zsample: Sequence[int]) -> int:
        return int(self.select(np.asarray(zsample)[None, :])[0])

    def posterior(self, samples: np.ndarray) -> np.ndarray:
        return _one_hot(self.select(samples), self.n_predictors)

    def posterior_counts(self, counts: np.ndarray) -> np.ndarray:
        return _one_hot(self.select_counts(counts), self.n_predictors)

    def as_randomized(self) -> 'RandomizedEstimator':
        """Dirac embedding delta_{f_hat}"""
        return RandomizedEstimator(
            self.n_predictors, self.n_outcomes,
            count_rule=self.posterior_counts if self.count_based else None,
            sample_rule=None if self.count_based else self.posterior,
            kind=self.kind, name=f"dirac[{self.name}]",
        )


class RandomizedEstimator(Estimator):
    """Map z^n -> distribution over predictors"""
    deterministic = False

    def __init__(self, n_predictors: int, n_outcomes: int, count_rule: Optional[BatchRule] = None,
                 sample_rule: Optional[BatchRule] = None, kind: EstimatorKind = EstimatorKind.CUSTOM,
                 name: str = "", prior: Optional[PriorOverClass] = None, eta: Optional[float] = None):
        super().__init__(n_predictors, n_outcomes, count_rule, sample_rule, kind, name)
        self.prior = prior
        self.eta = eta

    def posterior(self, samples: np.ndarray) -> np.ndarray:
        return np.asarray(self._apply(samples), dtype=float)

    def posterior_counts(self, counts: np.ndarray) -> np.ndarray:
        return np.asarray(self._apply_counts(counts), dtype=float)

    def __call__(self, zsample: Sequence[int]) -> np.ndarray:
        return self.posterior(np.asarray(zsample)[None, :])[0]


def _one_hot(indices: np.ndarray, size: int) -> np.ndarray:
    table = np.zeros((indices.size, size))
    table[np.arange(indices.size), indices] = 1.0
    return table


def as_randomized(est: Estimator) -> RandomizedEstimator:
    if isinstance(est, DeterministicEstimator):
        return est.as_randomized()
    return est


def dirac(problem: LearningProblem, f: int) -> DeterministicEstimator:
    """The constant estimator that always returns f"""
    f = problem.predictors.check_index(f)
    return DeterministicEstimator(
        problem.n_predictors, problem.n_outcomes,
        count_rule=lambda counts: np.full(counts.shape[0], f, dtype=np.int64),
        kind=EstimatorKind.DIRAC, name=f"dirac:{f}",
    )
