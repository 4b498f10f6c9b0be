"""
Risk Bounds
From the annealed-risk identity to an ESI on the actual excess risk under
the v-central condition
"""

import logging
from dataclasses import dataclass
from typing import Optional

from src.core.errors import PreconditionFailed
from src.core.results import VerificationResult
from src.complexity.luckiness import LuckinessFunction
from src.complexity.shtarkov import ComplexityReport, sample_complexities, shtarkov_generalized
from src.conditions.bernstein import VFunction, v_central_check
from src.conditions.esi import EsiStatement, certify, esi_moment
from src.entropify.model import EntropifiedModel
from src.estimators.base import Estimator
from src.measure.enumerator import SampleFunction
from src.measure.logspace import masked_expectation
from src.measure.montecarlo import McConfig
from src.problem.risk import excess_risks

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RiskBound:
    """Both sides of the risk ESI as sample functions, with its certificate"""
    lhs_risk: SampleFunction
    rhs_bound: SampleFunction
    esi: VerificationResult
    report: ComplexityReport
    gamma: float
    v: float


def risk_bound_eval(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction],
                    gamma: float, v: VFunction, cfg: Optional[McConfig] = None,
                    cap: Optional[int] = None) -> RiskBound:
    """
    E_{f ~ Pi_hat}[E_P R_f] <=_{v n / 6} 3 comp_full_{v/2}(F, Pi_hat, w, Z^n) / n + 4 gamma

    with v = v(gamma). The complexity is taken at rate v(gamma)/2 whatever
    the model's own rate.

    Raises:
        PreconditionFailed: the v-central condition fails at gamma
    """
    central = v_central_check(model.problem, v, [gamma])
    if not central.passed:
        raise PreconditionFailed(f"v-central condition fails at gamma={gamma:g}")
    rate = v(gamma)
    half = model.at_eta(rate / 2.0)
    report = shtarkov_generalized(half, est, w, cfg=cfg, cap=cap)
    risks = excess_risks(model.problem)
    n = model.n

    def lhs_risk(samples):
        return masked_expectation(est.posterior(samples), risks[None, :])

    def rhs_bound(samples):
        return 3.0 * sample_complexities(half, est, w, samples, report.log_shtarkov)[1] / n + 4.0 * gamma

    stmt = EsiStatement(lhs_risk, rhs_bound, rate * n / 6.0, name="risk bound")
    moment = esi_moment(model.problem, stmt, cfg=cfg, cap=cap)
    result = certify(stmt, moment, gamma=gamma, v=rate, estimator=est.name)
    logger.debug("risk bound at gamma=%g (v=%g): moment %.12g", gamma, rate, moment.value)
    return RiskBound(lhs_risk, rhs_bound, result, report, gamma, rate)
