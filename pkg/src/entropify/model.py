"""
Entropified Model
Maps each predictor f to the density q_f = p exp(-eta R_f) / c1(f) and
serves the normalizers, sample densities and annealed risks built from it
"""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from src.core.errors import DivisionBySupportMismatch, PreconditionFailed
from src.measure.enumerator import ProductMeasure
from src.problem.risk import check_sample, excess_loss_table, outcome_counts
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)


class EntropifiedModel:
    """
    Entropified version of a learning problem at rate eta.

    c1(f) = E_P[exp(-eta R_f(Z))] is computed once per predictor; every
    Q_f quantity derives from it since Q_f^n factorizes over the sample.
    """

    def __init__(self, problem: LearningProblem, eta: Optional[float] = None):
        self.problem = problem
        self.eta = float(problem.eta if eta is None else eta)
        if not self.eta > 0:
            raise PreconditionFailed("eta must be positive")
        self._variants: Dict[float, 'EntropifiedModel'] = {self.eta: self}

        self.excess_table = excess_loss_table(problem)
        log_p = problem.p_true.log_masses
        support = problem.p_true.support

        # log c1(f) over the support of P
        self.log_c1 = logsumexp(log_p[support] - self.eta * self.excess_table[:, support], axis=1)

        with np.errstate(invalid='ignore'):
            log_q = (log_p - problem.space.log_nu)[None, :] - self.eta * self.excess_table - self.log_c1[:, None]
        log_q[:, problem.p_true.masses == 0] = -np.inf
        log_q.setflags(write=False)
        self.log_q = log_q

    # Construction helpers

    def at_eta(self, eta: Optional[float]) -> 'EntropifiedModel':
        """The same problem entropified at another rate (cached)"""
        if eta is None:
            return self
        eta = float(eta)
        if eta not in self._variants:
            variant = EntropifiedModel(self.problem, eta)
            variant._variants = self._variants
            self._variants[eta] = variant
        return self._variants[eta]

    # Per-predictor quantities

    @property
    def n(self) -> int:
        return self.problem.n

    @property
    def n_predictors(self) -> int:
        return self.problem.n_predictors

    @property
    def log_normalizers(self) -> np.ndarray:
        """log C(f) = n log c1(f) for every predictor"""
        return self.problem.n * self.log_c1

    def normalizer(self, f: int) -> float:
        """log C(f) = n log c1(f)"""
        f = self.problem.predictors.check_index(f)
        return float(self.problem.n * self.log_c1[f])

    def annealed_excess_risks(self) -> np.ndarray:
        """-(1/eta) log c1(f) for every predictor"""
        return -self.log_c1 / self.eta

    def annealed_excess_risk(self, f: int) -> float:
        f = self.problem.predictors.check_index(f)
        return float(-self.log_c1[f] / self.eta)

    def q_masses(self, f0: int) -> np.ndarray:
        """Per-outcome probability masses of Q_f0 (density times nu)"""
        f0 = self.problem.predictors.check_index(f0)
        return np.exp(self.log_q[f0]) * self.problem.space.nu_weights

    def entropified_measure(self, f0: int, n: Optional[int] = None) -> ProductMeasure:
        """Q_f0^n as a product measure for the measure engine"""
        return ProductMeasure(
            log_weights=self.log_q[self.problem.predictors.check_index(f0)] + self.problem.space.log_nu,
            n=self.problem.n if n is None else int(n),
            log_nu=self.problem.space.log_nu,
        )

    def density_ratio_bound(self, f0: int) -> float:
        """
        max_z q_f0(z) / p(z) over the support of P

        Raises:
            DivisionBySupportMismatch: q_f0 puts mass where p has none
        """
        f0 = self.problem.predictors.check_index(f0)
        masses = self.problem.p_true.masses
        if np.any(np.isfinite(self.log_q[f0]) & (masses == 0)):
            raise DivisionBySupportMismatch(f"q_{f0} is positive outside the support of p")
        support = self.problem.p_true.support
        return float(np.exp(np.max(-self.eta * self.excess_table[f0, support] - self.log_c1[f0])))

    # Sample-level quantities

    def excess_losses(self, samples: np.ndarray) -> np.ndarray:
        """R_f(z^n) for a (batch, n) array of samples; shape (batch, |F|)"""
        counts = outcome_counts(samples, self.problem.n_outcomes)
        return counts @ self.excess_table.T

    def log_q_samples(self, samples: np.ndarray, log_p: Optional[np.ndarray] = None,
                      log_nu: Optional[np.ndarray] = None) -> np.ndarray:
        """
        log q_f(z^n) for a batch of samples and every predictor; shape (batch, |F|)

        log p(z^n) and log nu(z^n) may be passed in when an enumerator already
        computed them.
        """
        samples = np.atleast_2d(samples)
        if log_p is None:
            log_p = self.problem.p_true.log_masses[samples].sum(axis=1)
        if log_nu is None:
            log_nu = self.problem.space.log_nu[samples].sum(axis=1)
        log_density = (log_p - log_nu)[:, None]
        return log_density - self.eta * self.excess_losses(samples) - self.log_normalizers[None, :]

    def q_density(self, f: int, zsample: Sequence[int]) -> float:
        """log q_f(z^n) = sum_i log q_f(z_i)"""
        f = self.problem.predictors.check_index(f)
        zsample = check_sample(self.problem, zsample)
        return float(self.log_q[f, zsample].sum())


def entropify(problem: LearningProblem, eta: Optional[float] = None) -> EntropifiedModel:
    """Entropify a problem at its own rate or at an override"""
    model = EntropifiedModel(problem, eta)
    logger.debug("entropified %d predictors at eta=%g", problem.n_predictors, model.eta)
    return model
