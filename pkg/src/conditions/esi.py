"""
Exponential Stochastic Inequalities
Moments E[exp(eta (lhs - rhs))], their certification, and the exact
annealed-risk identity satisfied by every (estimator, luckiness) pair
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.core.config import tolerance
from src.core.constants import ESI_TAIL_LEVELS
from src.core.errors import PreconditionFailed
from src.core.results import VerificationResult, combine_results, identity_result, inequality_result
from src.complexity.luckiness import LuckinessFunction
from src.complexity.shtarkov import ComplexityReport, sample_complexities, shtarkov_generalized
from src.entropify.model import EntropifiedModel
from src.estimators.base import Estimator
from src.measure.enumerator import MeasureLike, SampleEnumerator, SampleFunction
from src.measure.logspace import masked_expectation
from src.measure.montecarlo import Estimate, McConfig, Method, log_expectation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EsiStatement:
    """
    lhs <=_eta rhs, i.e. E[exp(eta (lhs - rhs))] <= 1, for sample functions
    (batch, n) -> (batch,). strict_equality asks for the moment to equal 1.
    """
    lhs: SampleFunction
    rhs: SampleFunction
    eta: float
    strict_equality: bool = False
    name: str = "esi"

    def __post_init__(self):
        if not self.eta > 0:
            raise PreconditionFailed("an ESI needs eta > 0")

    def log_moment_terms(self, samples: np.ndarray) -> np.ndarray:
        lhs = np.asarray(self.lhs(samples), dtype=float)
        rhs = np.asarray(self.rhs(samples), dtype=float)
        with np.errstate(invalid='ignore'):
            gap = np.where(lhs == rhs, 0.0, lhs - rhs)
        return self.eta * gap


def esi_moment(source: MeasureLike, stmt: EsiStatement, cfg: Optional[McConfig] = None,
               cap: Optional[int] = None) -> Estimate:
    """
    E_{Z^n ~ P}[exp(eta (lhs - rhs))]

    Exact under the enumeration cap, Monte Carlo (with standard error) above it.
    """
    estimate = log_expectation(source, stmt.log_moment_terms, cfg=cfg, cap=cap)
    value = math.exp(estimate.log_value)
    return Estimate(value, value * estimate.rel_std_error, estimate.method)


def certify(stmt: EsiStatement, moment: Estimate, **details) -> VerificationResult:
    """
    Turn a moment into a verdict: tolerance identity/inequality when exact,
    MC_SIGMAS standard errors under Monte Carlo
    """
    if moment.method is Method.EXACT:
        tol = tolerance('identity') if stmt.strict_equality else tolerance('inequality')
    else:
        tol = tolerance('mc_sigmas') * moment.std_error
    details = dict(details, eta=stmt.eta, method=moment.method.value, std_error=moment.std_error)
    if stmt.strict_equality:
        return identity_result(stmt.name, moment.value, 1.0, tol, **details)
    return inequality_result(stmt.name, moment.value, 1.0, tol, **details)


def theorem1_statement(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction],
                       report: ComplexityReport) -> EsiStatement:
    """
    E_{f ~ Pi_hat}[annealed excess risk of f] =*_{n eta} comp_full(F, Pi_hat, w, Z^n) / n
    """
    annealed = model.annealed_excess_risks()

    def lhs(samples):
        return masked_expectation(est.posterior(samples), annealed[None, :])

    def rhs(samples):
        return sample_complexities(model, est, w, samples, report.log_shtarkov)[1] / model.n

    return EsiStatement(lhs, rhs, model.n * model.eta, strict_equality=True, name="theorem1 identity")


def theorem1_identity(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction] = None,
                      cfg: Optional[McConfig] = None, cap: Optional[int] = None) -> VerificationResult:
    """
    Certify that the annealed-risk ESI holds with equality:
    E_P[exp(n eta (E_post[annealed R_f] - comp_full / n))] = 1

    Raises:
        PreconditionFailed: the Shtarkov integral is infinite
    """
    report = shtarkov_generalized(model, est, w, cfg=cfg, cap=cap)
    if not report.finite:
        raise PreconditionFailed("Shtarkov integral is infinite; the identity is undefined")
    stmt = theorem1_statement(model, est, w, report)
    moment = esi_moment(model.problem, stmt, cfg=cfg, cap=cap)
    logger.debug("theorem1 moment for %s: %.15g", est.name, moment.value)
    return certify(stmt, moment, estimator=est.name, log_shtarkov=report.log_shtarkov)


def esi_implications_check(source: MeasureLike, stmt: EsiStatement,
                           cap: Optional[int] = None) -> VerificationResult:
    """
    Check what an ESI implies, by enumeration:
    (i) E[lhs] <= E[rhs] and (ii) P(lhs > rhs + K/eta) <= exp(-K) for each tail level K

    Raises:
        PreconditionFailed: the moment exceeds 1, so the statement is not an ESI
    """
    chunk = SampleEnumerator(source, cap=cap).materialize()
    weights = np.exp(chunk.log_weight)
    lhs = np.asarray(stmt.lhs(chunk.samples), dtype=float)
    rhs = np.asarray(stmt.rhs(chunk.samples), dtype=float)
    moment = float(weights @ np.exp(stmt.log_moment_terms(chunk.samples)))
    if moment > 1.0 + tolerance('identity'):
        raise PreconditionFailed(f"{stmt.name}: moment {moment:.12g} exceeds 1")

    tol = tolerance('inequality')
    parts = [inequality_result(f"{stmt.name}: mean", float(masked_expectation(weights, lhs)),
                               float(masked_expectation(weights, rhs)), tol)]
    for level in ESI_TAIL_LEVELS:
        exceed = float(weights[lhs > rhs + level / stmt.eta].sum())
        parts.append(inequality_result(f"{stmt.name}: tail K={level}", exceed, math.exp(-level), tol))
    return combine_results(f"{stmt.name} implications", parts, tol, moment=moment)
