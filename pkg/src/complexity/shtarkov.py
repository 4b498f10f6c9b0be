"""
Shtarkov Integrals
Simple, maximal, luckiness and generalized Shtarkov integrals with the
complexities derived from them

Every integral int q(z^n) w dnu is evaluated as an expectation under P^n,
E_P[exp(-E_post[eta R_f + log C(f) - log w])], so it never leaves the log
domain and the measure engine can route it to Monte Carlo.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import PreconditionFailed
from src.complexity.luckiness import LuckinessFunction
from src.entropify.model import EntropifiedModel
from src.estimators.base import DeterministicEstimator, Estimator, EstimatorKind
from src.measure.enumerator import ProductMeasure, exact_log_expectation
from src.measure.logspace import masked_expectation
from src.measure.montecarlo import McConfig, Method, log_expectation
from src.problem.risk import check_sample, outcome_counts

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComplexityReport:
    """
    A Shtarkov integral and its complexity.

    comp is log_shtarkov / eta, the sample-independent part; the luckiness
    and generalized complexities add E_post[-log w(z^n, f)] / eta at a
    concrete sample, and comp_full adds E_post[R_f(z^n)] on top.
    std_error is the standard error of log_shtarkov (0 when exact).
    """
    name: str
    log_shtarkov: float
    comp: float
    eta: float
    method: Method
    std_error: float = 0.0
    comp_full: Optional[float] = None
    estimator: Optional[Estimator] = None

    @property
    def shtarkov(self) -> float:
        return math.exp(self.log_shtarkov)

    @property
    def finite(self) -> bool:
        """False flags an infinite Shtarkov integral"""
        return math.isfinite(self.log_shtarkov)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'name': self.name,
            'log_shtarkov': self.log_shtarkov,
            'comp': self.comp,
            'comp_full': self.comp_full,
            'eta': self.eta,
            'method': self.method.value,
            'std_error': self.std_error,
            'finite': self.finite,
        }
        return {k: (str(v) if isinstance(v, float) and not math.isfinite(v) else v) for k, v in data.items()}


# Per-sample building blocks

def log_luckiness(w: Optional[LuckinessFunction], samples: np.ndarray, n_predictors: int) -> np.ndarray:
    if w is None:
        return np.zeros((np.atleast_2d(samples).shape[0], n_predictors))
    return w.log_values(samples)


def log_integrand(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction],
                  samples: np.ndarray) -> np.ndarray:
    """-E_post[eta R_f + log C(f) - log w(z^n, f)] per sample"""
    posterior = est.posterior(samples)
    cost = (model.eta * model.excess_losses(samples) + model.log_normalizers[None, :]
            - log_luckiness(w, samples, model.n_predictors))
    return -masked_expectation(posterior, cost)


def sample_complexities(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction],
                        samples: np.ndarray, log_shtarkov: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    comp and comp_full at every sample of a batch

    Returns:
        ((E_post[-log w] + log S) / eta, comp + E_post[R_f(z^n)]); +inf where
        w vanishes on posterior mass

    Raises:
        PreconditionFailed: S = 0, so w vanishes on every sample with mass
    """
    if log_shtarkov == -math.inf:
        raise PreconditionFailed("Shtarkov integral is zero; complexities are undefined")
    samples = np.atleast_2d(samples)
    posterior = est.posterior(samples)
    neg_log_w = -log_luckiness(w, samples, model.n_predictors)
    comp = (masked_expectation(posterior, neg_log_w) + log_shtarkov) / model.eta
    full = comp + masked_expectation(posterior, model.excess_losses(samples))
    return comp, full


def _full_sample(model: EntropifiedModel, zsample: Sequence[int]) -> np.ndarray:
    zsample = check_sample(model.problem, zsample)
    if zsample.size != model.n:
        raise PreconditionFailed(f"complexities need a sample of length n = {model.n}, got {zsample.size}")
    return zsample[None, :]


def _integral(model: EntropifiedModel, name: str, est: Estimator, w: Optional[LuckinessFunction],
              cfg: Optional[McConfig], cap: Optional[int]) -> ComplexityReport:
    estimate = log_expectation(ProductMeasure.of_problem(model.problem),
                               lambda samples: log_integrand(model, est, w, samples), cfg=cfg, cap=cap)
    if estimate.log_value == math.inf:
        logger.warning("%s: Shtarkov integral is infinite", name)
    return ComplexityReport(name, estimate.log_value, estimate.log_value / model.eta, model.eta,
                            estimate.method, estimate.rel_std_error, estimator=est)


def _require_deterministic(est: Estimator):
    if not isinstance(est, DeterministicEstimator):
        raise PreconditionFailed(f"estimator '{est.name}' is not deterministic")


# Integrals

def shtarkov_simple(model: EntropifiedModel, est: DeterministicEstimator,
                    cfg: Optional[McConfig] = None, cap: Optional[int] = None) -> ComplexityReport:
    """
    S(F, f_hat) = E_P[exp(-eta R_f_hat(Z^n)) / C(f_hat)] and comp = log S / eta

    Monte Carlo takes over above the enumeration cap.
    """
    _require_deterministic(est)
    return _integral(model, "simple", est, None, cfg, cap)


def shtarkov_luckiness(model: EntropifiedModel, est: DeterministicEstimator, w: LuckinessFunction,
                       cfg: Optional[McConfig] = None, cap: Optional[int] = None) -> ComplexityReport:
    """S(F, f_hat, w) = int q_f_hat(z^n) w(z^n) dnu for w ignoring its predictor argument"""
    _require_deterministic(est)
    if not w.ignores_predictor:
        raise PreconditionFailed(f"{w!r} depends on the predictor; use the generalized integral")
    return _integral(model, "luckiness", est, w, cfg, cap)


def shtarkov_generalized(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction] = None,
                         cfg: Optional[McConfig] = None, cap: Optional[int] = None) -> ComplexityReport:
    """S(F, Pi_hat, w) = E_P[exp(-E_{f ~ Pi_hat}[eta R_f + log C(f) - log w])]"""
    return _integral(model, "generalized", est, w, cfg, cap)


def comp_max(model: EntropifiedModel, block: Optional[Sequence[int]] = None,
             cap: Optional[int] = None) -> ComplexityReport:
    """
    Maximal complexity (1/eta) log int sup_f q_f dnu, exact only

    The supremum sits inside the integral, so there is no Monte Carlo path.
    The report carries the maximum likelihood estimator over the entropified
    family (restricted to block when given).

    Raises:
        EnumerationCapExceeded: |Z|^n above the cap
    """
    block = np.arange(model.n_predictors) if block is None else np.asarray(block, dtype=np.int64)
    if block.size == 0:
        raise PreconditionFailed("maximal complexity of an empty block")
    ml = maximum_likelihood(model, block)
    log_norm = model.log_normalizers[block]
    excess_T = np.ascontiguousarray(model.excess_table[block].T)

    def log_sup(samples):
        counts = outcome_counts(samples, model.problem.n_outcomes)
        return np.max(-model.eta * (counts @ excess_T) - log_norm[None, :], axis=1)

    log_s = exact_log_expectation(ProductMeasure.of_problem(model.problem), log_sup, cap=cap)
    return ComplexityReport("max", log_s, log_s / model.eta, model.eta, Method.EXACT, estimator=ml)


def maximum_likelihood(model: EntropifiedModel, block: Optional[Sequence[int]] = None) -> DeterministicEstimator:
    """z^n -> argmax_f q_f(z^n) = argmin_f [eta R_f(z^n) + log C(f)], ties to the lowest index"""
    block = np.arange(model.n_predictors) if block is None else np.asarray(block, dtype=np.int64)
    excess_T = np.ascontiguousarray(model.excess_table[block].T)
    log_norm = model.log_normalizers[block]
    eta = model.eta
    return DeterministicEstimator(
        model.n_predictors, model.problem.n_outcomes,
        count_rule=lambda counts: block[np.argmin(eta * (counts @ excess_T) + log_norm[None, :], axis=1)],
        kind=EstimatorKind.MAXIMUM_LIKELIHOOD, name="ml",
    )


# Data-dependent complexities

def comp_luckiness(model: EntropifiedModel, est: DeterministicEstimator, w: LuckinessFunction,
                   zsample: Sequence[int], report: Optional[ComplexityReport] = None) -> float:
    """(1/eta)(-log w(z^n) + log S(F, f_hat, w)); +inf when w(z^n) = 0"""
    report = report or shtarkov_luckiness(model, est, w)
    comp, _ = sample_complexities(model, est, w, _full_sample(model, zsample), report.log_shtarkov)
    if comp[0] == math.inf:
        logger.warning("zero luckiness at sample %s", list(zsample))
    return float(comp[0])


def comp_generalized(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction],
                     zsample: Sequence[int], report: Optional[ComplexityReport] = None) -> float:
    """(1/eta)(E_{f ~ Pi_hat}[-log w(z^n, f)] + log S(F, Pi_hat, w))"""
    report = report or shtarkov_generalized(model, est, w)
    comp, _ = sample_complexities(model, est, w, _full_sample(model, zsample), report.log_shtarkov)
    if comp[0] == math.inf:
        logger.warning("zero luckiness under posterior mass at sample %s", list(zsample))
    return float(comp[0])


def comp_full(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction],
              zsample: Sequence[int], report: Optional[ComplexityReport] = None) -> float:
    """comp_generalized plus the posterior-expected excess loss E_{f ~ Pi_hat}[R_f(z^n)]"""
    report = report or shtarkov_generalized(model, est, w)
    _, full = sample_complexities(model, est, w, _full_sample(model, zsample), report.log_shtarkov)
    return float(full[0])
