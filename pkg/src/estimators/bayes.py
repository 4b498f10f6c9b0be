"""
Generalized Bayes
The eta-tempered posterior and the information complexity it minimizes
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp, rel_entr

from src.core.constants import INEQUALITY_TOL
from src.core.errors import AbsoluteContinuityViolated, DegeneratePrior, PreconditionFailed
from src.estimators.base import EstimatorKind, PriorOverClass, RandomizedEstimator, as_randomized, Estimator
from src.problem.risk import check_sample, excess_loss_table
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)


def tempered_posterior(log_prior: np.ndarray, cumulative_losses: np.ndarray, eta: float) -> np.ndarray:
    """
    Rows of pi(f) exp(-eta L_f) normalized, for a (batch, |F|) matrix of
    cumulative losses L_f
    """
    logits = log_prior[None, :] - eta * cumulative_losses
    norm = logsumexp(logits, axis=1, keepdims=True)
    if np.any(norm == -np.inf):
        raise DegeneratePrior("prior has no mass on any predictor")
    return np.exp(logits - norm)


def generalized_bayes(problem: LearningProblem, prior: PriorOverClass, eta: Optional[float] = None) -> RandomizedEstimator:
    """
    Eta-generalized Bayesian estimator

    Returns:
        randomized estimator z^n -> pi_hat(f | z^n) proportional to exp(-eta sum_i l_f(z_i)) pi(f)
    """
    eta = problem.eta if eta is None else float(eta)
    if not eta > 0:
        raise PreconditionFailed("generalized Bayes needs eta > 0")
    if prior.size != problem.n_predictors:
        raise PreconditionFailed("prior must have one mass per predictor")
    if not np.any(prior.masses > 0):
        raise DegeneratePrior("prior has no mass")
    log_prior = prior.log_masses
    losses_T = np.ascontiguousarray(problem.loss_table.T)
    return RandomizedEstimator(
        problem.n_predictors, problem.n_outcomes,
        count_rule=lambda counts: tempered_posterior(log_prior, counts @ losses_T, eta),
        kind=EstimatorKind.GENERALIZED_BAYES, name=f"bayes(eta={eta:g})",
        prior=prior, eta=eta,
    )


@dataclass(frozen=True)
class InformationComplexity:
    """E_post[R_f(z^n)] + KL(post || prior)/eta, with its parts"""
    value: float
    expected_excess: float
    kl: float
    extended_stochastic_complexity: Optional[float] = None
    identity_gap: Optional[float] = None


def kl_divergence(posterior: np.ndarray, prior: np.ndarray) -> float:
    """KL(posterior || prior); raises when the posterior is not absolutely continuous"""
    terms = rel_entr(posterior, prior)
    if np.any(np.isinf(terms)):
        raise AbsoluteContinuityViolated("posterior puts mass where the prior has none")
    return float(terms.sum())


def extended_stochastic_complexity(problem: LearningProblem, prior: PriorOverClass,
                                   zsample: Sequence[int], eta: Optional[float] = None) -> float:
    """-(1/eta) log E_{f ~ prior}[exp(-eta R_f(z^n))]"""
    eta = problem.eta if eta is None else float(eta)
    zsample = check_sample(problem, zsample)
    excess = excess_loss_table(problem)[:, zsample].sum(axis=1)
    live = prior.masses > 0
    return float(-logsumexp(-eta * excess[live], b=prior.masses[live]) / eta)


def information_complexity(problem: LearningProblem, prior: PriorOverClass, est: Estimator,
                           zsample: Sequence[int], eta: Optional[float] = None) -> InformationComplexity:
    """
    Information complexity of a randomized estimator on one sample

    When est is the generalized Bayes estimator at the same eta and prior,
    the extended stochastic complexity is returned too; the two must agree.

    Raises:
        AbsoluteContinuityViolated: posterior mass outside the prior's support
    """
    eta = problem.eta if eta is None else float(eta)
    zsample = check_sample(problem, zsample)
    posterior = as_randomized(est).posterior(zsample[None, :])[0]
    excess = excess_loss_table(problem)[:, zsample].sum(axis=1)

    kl = kl_divergence(posterior, prior.masses)
    expected = float(posterior[posterior > 0] @ excess[posterior > 0])
    value = expected + kl / eta

    esc = gap = None
    if (getattr(est, 'kind', None) is EstimatorKind.GENERALIZED_BAYES
            and getattr(est, 'eta', None) is not None and math.isclose(est.eta, eta)
            and est.prior is not None and np.allclose(est.prior.masses, prior.masses, rtol=0, atol=1e-15)):
        esc = extended_stochastic_complexity(problem, prior, zsample, eta)
        gap = abs(value - esc)
        if gap > INEQUALITY_TOL * max(1.0, abs(esc)):
            logger.warning("information complexity %.17g differs from extended stochastic complexity %.17g",
                           value, esc)
    return InformationComplexity(value, expected, kl, esc, gap)
