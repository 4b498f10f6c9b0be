"""
Luckiness Functions
Nonnegative weights w(z^n, f), evaluated in log domain on batches of samples
"""

import math
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from src.core.errors import BadPartition, MalformedSpec, PreconditionFailed
from src.estimators.base import (
    DeterministicEstimator,
    Estimator,
    PenaltyFunction,
    PriorOverClass,
    as_randomized,
)
from src.problem.partition import Partition


class LuckinessKind(Enum):
    CONSTANT = "const"
    PRIOR_RATIO = "prior-ratio"
    PENALTY = "penalty"
    COMPOSITE = "composite"


def _log(values) -> np.ndarray:
    with np.errstate(divide='ignore'):
        return np.log(values)


class LuckinessFunction:
    """
    A luckiness function over a class of n_predictors predictors.

    Build instances with the classmethods; log_values(samples) returns the
    (batch, |F|) table of log w(z^n, f), with -inf where w vanishes.
    """

    def __init__(self, kind: LuckinessKind, n_predictors: int, **parts):
        self.kind = kind
        self.n_predictors = n_predictors
        self._parts = parts
        for key, value in parts.items():
            setattr(self, key, value)

    # Catalog

    @classmethod
    def constant(cls, n_predictors: int, c: float = 1.0) -> 'LuckinessFunction':
        if not (math.isfinite(c) and c > 0):
            raise MalformedSpec("constant luckiness must be a finite positive number")
        return cls(LuckinessKind.CONSTANT, n_predictors, c=float(c))

    @classmethod
    def prior_ratio(cls, prior: PriorOverClass, est: Estimator) -> 'LuckinessFunction':
        """w(z^n, f) = pi(f) / pi_hat(f | z^n)"""
        if prior.size != est.n_predictors:
            raise PreconditionFailed("prior and estimator disagree on the class size")
        return cls(LuckinessKind.PRIOR_RATIO, est.n_predictors, prior=prior, est=as_randomized(est))

    @classmethod
    def penalty(cls, gamma: PenaltyFunction, est: DeterministicEstimator) -> 'LuckinessFunction':
        """w(z^n) = exp(-Gamma(f_hat(z^n))), ignoring f"""
        if not isinstance(est, DeterministicEstimator):
            raise PreconditionFailed("penalty luckiness needs a deterministic estimator")
        if gamma.gamma.size != est.n_predictors:
            raise PreconditionFailed("one penalty value per predictor")
        return cls(LuckinessKind.PENALTY, est.n_predictors, gamma=gamma, est=est)

    @classmethod
    def composite(cls, partition: Partition, pi_K: PriorOverClass, sub: Sequence['LuckinessFunction'],
                  est: Estimator, log_scales: Optional[Sequence[float]] = None) -> 'LuckinessFunction':
        """
        w(z^n, f) = w_k(z^n, f) pi_K(k) / pi_hat_K(k | z^n) for f in block k.

        Each sub-luckiness is defined on the whole class; only its columns in
        block k are used. log_scales multiplies w_k by exp(log_scales[k]).
        """
        if pi_K.size != partition.size or len(sub) != partition.size:
            raise BadPartition("one block prior mass and one sub-luckiness per block")
        if any(w.n_predictors != partition.n_predictors for w in sub):
            raise BadPartition("sub-luckiness functions must cover the whole class")
        scales = np.zeros(partition.size) if log_scales is None else np.asarray(log_scales, dtype=float)
        return cls(LuckinessKind.COMPOSITE, partition.n_predictors, partition=partition, pi_K=pi_K,
                   sub=tuple(sub), est=as_randomized(est), log_scales=scales)

    # Evaluation

    @property
    def ignores_predictor(self) -> bool:
        """True when w(z^n, f) does not depend on f"""
        return self.kind in (LuckinessKind.CONSTANT, LuckinessKind.PENALTY)

    def log_values(self, samples: np.ndarray, posterior: Optional[np.ndarray] = None) -> np.ndarray:
        """
        log w(z^n, f) for a (batch, n) array of samples; shape (batch, |F|)

        posterior may carry the estimator's masses on these samples when the
        caller already has them (prior-ratio and composite kinds).
        """
        samples = np.atleast_2d(samples)
        batch = samples.shape[0]
        if self.kind is LuckinessKind.CONSTANT:
            return np.full((batch, self.n_predictors), _log(self.c))
        if self.kind is LuckinessKind.PENALTY:
            picks = self.est.select(samples)
            return np.repeat(-self.gamma.gamma[picks][:, None], self.n_predictors, axis=1)
        if posterior is None:
            posterior = self.est.posterior(samples)
        if self.kind is LuckinessKind.PRIOR_RATIO:
            # +inf where the posterior vanishes; masked out by every expectation
            return self.prior.log_masses[None, :] - _log(posterior)
        return self._composite_log_values(samples, posterior)

    def _composite_log_values(self, samples: np.ndarray, posterior: np.ndarray) -> np.ndarray:
        partition = self.partition
        block_mass = block_masses(posterior, partition)
        with np.errstate(invalid='ignore'):
            # nan only on blocks without posterior mass, which expectations mask
            log_block_ratio = self.pi_K.log_masses[None, :] - _log(block_mass)
        values = np.empty_like(posterior)
        for k, sub in enumerate(self.sub):
            columns = partition.indices(k)
            values[:, columns] = (sub.log_values(samples)[:, columns]
                                  + log_block_ratio[:, [k]] + self.log_scales[k])
        return values

    def __call__(self, zsample: Sequence[int], f: int) -> float:
        """w(z^n, f) for one sample"""
        return float(np.exp(self.log_values(np.asarray(zsample)[None, :])[0, int(f)]))

    def scaled(self, c: float) -> 'LuckinessFunction':
        """c * w for c > 0"""
        if not c > 0:
            raise PreconditionFailed("luckiness can only be scaled by c > 0")
        return _ScaledLuckiness(self, math.log(c))

    def __repr__(self):
        return f"LuckinessFunction({self.kind.value})"


class _ScaledLuckiness(LuckinessFunction):

    def __init__(self, base: LuckinessFunction, log_c: float):
        super().__init__(base.kind, base.n_predictors, **base._parts)
        self._base = base
        self._log_c = log_c

    def log_values(self, samples: np.ndarray, posterior: Optional[np.ndarray] = None) -> np.ndarray:
        return self._base.log_values(samples, posterior) + self._log_c


def block_masses(posterior: np.ndarray, partition: Partition) -> np.ndarray:
    """(batch, |K|) posterior mass of every block"""
    onehot = np.zeros((partition.n_predictors, partition.size))
    onehot[np.arange(partition.n_predictors), partition.block_of] = 1.0
    return posterior @ onehot
