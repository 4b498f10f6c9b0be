"""
NML Densities
The (luckiness-)normalized maximum likelihood density over all samples and
its per-sample regret
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from src.core.errors import PreconditionFailed
from src.complexity.luckiness import LuckinessFunction
from src.complexity.shtarkov import log_integrand, log_luckiness
from src.entropify.model import EntropifiedModel
from src.estimators.base import DeterministicEstimator, Estimator
from src.measure.enumerator import SampleEnumerator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NmlDensity:
    """
    r_w(z^n) for every sample of Z^n in odometer order.

    log_density is taken w.r.t. nu^n; -inf marks samples outside the
    support of P^n.
    """
    samples: np.ndarray
    log_density: np.ndarray
    log_nu: np.ndarray
    log_shtarkov: float

    @property
    def support(self) -> np.ndarray:
        return self.log_density > -np.inf

    def total_mass(self) -> float:
        """int r_w dnu; 1 up to rounding"""
        return float(np.exp(logsumexp((self.log_density + self.log_nu)[self.support])))

    def regret(self, log_reference: np.ndarray) -> np.ndarray:
        """-log r_w(z^n) + log_reference(z^n) on the support"""
        return -self.log_density[self.support] + np.asarray(log_reference)[self.support]


def nml_density(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction] = None,
                cap: Optional[int] = None) -> NmlDensity:
    """
    Luckiness NML density r_w = q_{f_hat|z^n}(z^n) w(z^n) / S by exact enumeration

    Randomized estimators use the generalized integrand
    p(z^n) exp(-E_post[eta R_f + log C(f) - log w]) in place of q w.

    Raises:
        PreconditionFailed: S is zero or infinite
        EnumerationCapExceeded: |Z|^n above the cap
    """
    chunk = SampleEnumerator(model.problem, cap=cap).materialize()
    log_unnormalized = chunk.log_weight - chunk.log_nu + log_integrand(model, est, w, chunk.samples)
    live = log_unnormalized > -np.inf
    if np.any(log_unnormalized == np.inf):
        raise PreconditionFailed("Shtarkov integral is infinite; no NML density")
    if not np.any(live):
        raise PreconditionFailed("Shtarkov integral is zero; no NML density")
    log_s = float(logsumexp((log_unnormalized + chunk.log_nu)[live]))
    logger.debug("NML density over %d samples, log S = %.12g", len(chunk), log_s)
    return NmlDensity(chunk.samples, log_unnormalized - log_s, chunk.log_nu, log_s)


def selected_log_q(model: EntropifiedModel, est: DeterministicEstimator, nml: NmlDensity) -> np.ndarray:
    """log q_{f_hat(z^n)}(z^n) over the NML sample table"""
    log_p = model.problem.p_true.log_masses[nml.samples].sum(axis=1)
    log_q = model.log_q_samples(nml.samples, log_p=log_p, log_nu=nml.log_nu)
    return log_q[np.arange(log_q.shape[0]), est.select(nml.samples)]


def nml_regret(model: EntropifiedModel, est: DeterministicEstimator, w: Optional[LuckinessFunction] = None,
               nml: Optional[NmlDensity] = None) -> np.ndarray:
    """
    Luckiness regret -log r_w(z^n) + log q_f_hat(z^n) + log w(z^n) per supported sample

    Equals log S everywhere: the NML strategy is an equalizer.
    """
    if not isinstance(est, DeterministicEstimator):
        raise PreconditionFailed("regret is defined for deterministic estimators")
    if w is not None and not w.ignores_predictor:
        raise PreconditionFailed("regret needs a luckiness function that ignores the predictor")
    nml = nml or nml_density(model, est, w)
    log_w = log_luckiness(w, nml.samples, model.n_predictors)[:, 0]
    return nml.regret(selected_log_q(model, est, nml) + log_w)


def spread(values: np.ndarray) -> float:
    """max - min; 0 for an empty array"""
    return float(values.max() - values.min()) if values.size else 0.0

