"""
Bernstein and Central Conditions
Fit the Bernstein constant, build v-functions from it, check the v-central
condition and the bridge from annealed to actual excess risk
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np
from scipy.special import logsumexp

from src.core.config import tolerance
from src.core.constants import V_CAP
from src.core.errors import DegenerateExcess, PreconditionFailed
from src.core.results import VerificationResult, combine_results, inequality_result
from src.entropify.annealed import annealed_expectation
from src.problem.risk import excess_loss_table, excess_risks
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)

# Excess risks at or below this count as zero
_ZERO_EXCESS = 1e-15


@dataclass(frozen=True)
class BernsteinFit:
    """Smallest B with E[R_f^2] <= B E[R_f]^beta for every f"""
    beta: float
    B: float
    vacuous: bool = False


def second_moments(problem: LearningProblem) -> np.ndarray:
    """E_P[R_f(Z)^2] for every predictor"""
    return (excess_loss_table(problem) ** 2) @ problem.p_true.masses


def fit_bernstein(problem: LearningProblem, beta: float) -> BernsteinFit:
    """
    Fit the beta-Bernstein constant

    f* and predictors with E[R_f] = E[R_f^2] = 0 are excluded (0/0). A class
    with nothing left is reported with B = 0 and flagged vacuous.

    Raises:
        PreconditionFailed: beta outside [0, 1]
        DegenerateExcess: beta > 0 and some f has E[R_f] = 0 < E[R_f^2]
    """
    if not 0.0 <= beta <= 1.0:
        raise PreconditionFailed(f"beta must lie in [0, 1], got {beta}")
    first = excess_risks(problem)
    second = second_moments(problem)
    zero = first <= _ZERO_EXCESS

    if beta > 0:
        bad = np.flatnonzero(zero & (second > 0))
        if bad.size:
            raise DegenerateExcess(f"predictor {int(bad[0])} has zero excess risk and positive "
                                   f"second moment; the {beta}-Bernstein condition cannot hold")
        live = ~zero
        ratios = second[live] / first[live] ** beta
    else:
        live = second > 0
        ratios = second[live]

    if ratios.size == 0:
        return BernsteinFit(float(beta), 0.0, vacuous=True)
    return BernsteinFit(float(beta), float(ratios.max()))


@dataclass(frozen=True)
class VFunction:
    """v(gamma) = min(eta0 gamma^alpha, cap)"""
    eta0: float
    alpha: float
    cap: float = V_CAP

    def __post_init__(self):
        if not self.eta0 > 0 or self.alpha < 0:
            raise PreconditionFailed("v-function needs eta0 > 0 and alpha >= 0")

    def __call__(self, gamma: float) -> float:
        if not gamma > 0:
            raise PreconditionFailed("v is defined for gamma > 0")
        return min(self.eta0 * gamma ** self.alpha, self.cap)

    @classmethod
    def from_bernstein(cls, fit: BernsteinFit) -> 'VFunction':
        """v(gamma) = min(gamma^(1 - beta) / B, 1); B = 0 gives v = 1"""
        eta0 = math.inf if fit.B == 0 else 1.0 / fit.B
        return cls(eta0, 1.0 - fit.beta)

    @classmethod
    def central(cls, eta: float) -> 'VFunction':
        """The eta-central condition: v constant (capped at 1)"""
        return cls(eta, 0.0)


def _log_exp_moments(problem: LearningProblem, v: float) -> np.ndarray:
    support = problem.p_true.support
    excess = excess_loss_table(problem)[:, support]
    return logsumexp(-v * excess, b=problem.p_true.masses[support][None, :], axis=1)


def v_central_check(problem: LearningProblem, v: VFunction, gamma_grid: Iterable[float]) -> VerificationResult:
    """
    Check E_P[exp(-v(gamma) R_f(Z))] <= exp(v(gamma) gamma) for every f and grid gamma

    Compared in log domain; the result carries the worst (f, gamma).
    """
    gamma_grid = [float(g) for g in gamma_grid]
    if not gamma_grid or min(gamma_grid) <= 0:
        raise PreconditionFailed("gamma grid must be nonempty and positive")
    worst = None
    for gamma in gamma_grid:
        rate = v(gamma)
        log_moments = _log_exp_moments(problem, rate)
        f = int(np.argmax(log_moments))
        slack = rate * gamma - log_moments[f]
        if worst is None or slack < worst[0]:
            worst = (slack, f, gamma, log_moments[f], rate * gamma)
    _, f, gamma, lhs, rhs = worst
    return inequality_result("v-central", lhs, rhs, tolerance('inequality'), predictor=f, gamma=gamma)


def kl_renyi_etas(v: VFunction, gamma: float) -> List[float]:
    """Learning rates at which the annealed bridge is checked: v/2 and v/4"""
    rate = v(gamma)
    return [rate / 2.0, rate / 4.0]


def kl_renyi_check(problem: LearningProblem, f: int, gamma: float, v: VFunction) -> VerificationResult:
    """
    Check E[R_f] <= C_eta annealed_eta(R_f) + ((C_eta - 1)/eta) v(gamma) gamma
    with C_eta = 2 + 2 eta, at eta = v(gamma)/2 and eta = v(gamma)/4
    """
    f = problem.predictors.check_index(f)
    values = excess_loss_table(problem)[f]
    masses = problem.p_true.masses
    mean = float(values @ masses)
    rate = v(gamma)
    parts = []
    for eta in kl_renyi_etas(v, gamma):
        c_eta = 2.0 + 2.0 * eta
        bound = c_eta * annealed_expectation(values, masses, eta) + (c_eta - 1.0) / eta * rate * gamma
        parts.append(inequality_result(f"kl-renyi f={f} eta={eta:.4g}", mean, bound, tolerance('inequality'),
                                       predictor=f, gamma=gamma, eta=eta))
    return combine_results(f"kl-renyi f={f} gamma={gamma:g}", parts, tolerance('inequality'),
                           predictor=f, gamma=gamma)
