"""
Rate Experiments
Mean excess risk of an estimator across sample sizes, a log-log slope fit,
and its comparison with the exponent the Bernstein condition predicts
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from src.core.config import setting
from src.core.constants import (
    BOUNDED_B_RATIO,
    DEFAULT_GAMMA_GRID,
    GRID_PER_SAMPLE,
    MC_BATCH,
    MIN_SLOPE_POINTS,
)
from src.core.errors import DegenerateExcess, EnumerationCapExceeded, PreconditionFailed
from src.core.events import EventType, publish
from src.conditions.bernstein import VFunction, fit_bernstein
from src.estimators.base import DeterministicEstimator, Estimator, PriorOverClass, dirac
from src.estimators.bayes import generalized_bayes
from src.estimators.erm import erm
from src.harness.generators import GeneratorFamily, GeneratorSpec, generate
from src.measure.enumerator import exact_expectation
from src.measure.montecarlo import Estimate, McConfig, Method, draw_samples
from src.problem.risk import excess_risks
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)

GammaRule = Callable[[int], float]


class RateEstimator(Enum):
    ERM = "erm"
    BAYES = "bayes"
    DIRAC = "dirac"


def build_estimator(problem: LearningProblem, kind: RateEstimator) -> Estimator:
    """ERM, generalized Bayes with a uniform prior, or the point mass on f*"""
    if kind is RateEstimator.ERM:
        return erm(problem)
    if kind is RateEstimator.BAYES:
        return generalized_bayes(problem, PriorOverClass.uniform(problem.n_predictors))
    return dirac(problem, problem.fstar_index)


def mean_excess_risk(problem: LearningProblem, est: Estimator, cfg: Optional[McConfig] = None,
                     cap: Optional[int] = None) -> Estimate:
    """
    E_{Z^n ~ P}[E_{f ~ Pi_hat}[E_P R_f]]

    Exact when Z^n is enumerable; otherwise Monte Carlo over data draws, in
    batches of multinomial outcome counts for count-based estimators.
    """
    risks = excess_risks(problem)
    try:
        value = exact_expectation(problem, lambda samples: est.posterior(samples) @ risks, cap=cap)
        return Estimate(value, 0.0, Method.EXACT)
    except EnumerationCapExceeded as e:
        cfg = cfg or McConfig.from_config()
        logger.info("%s; %d data draws instead", e, cfg.trials)
        publish(EventType.MC_FALLBACK, states=e.states, cap=e.cap, trials=cfg.trials)

    values = []
    if est.count_based:
        rng = cfg.generator()
        masses = problem.p_true.masses
        for start in range(0, cfg.trials, MC_BATCH):
            counts = rng.multinomial(problem.n, masses, size=min(MC_BATCH, cfg.trials - start))
            if isinstance(est, DeterministicEstimator):
                values.append(risks[est.select_counts(counts)])
            else:
                values.append(est.posterior_counts(counts) @ risks)
        values = np.concatenate(values)
    else:
        values = est.posterior(draw_samples(problem, cfg)) @ risks
    return Estimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size)),
                    Method.MONTE_CARLO)


def target_beta(problems: Sequence[LearningProblem]) -> float:
    """
    Largest beta in {1, 1/2, 0} whose Bernstein constant stays bounded across
    the problems: largest over smallest nonvacuous B at most BOUNDED_B_RATIO
    """
    for beta in (1.0, 0.5):
        try:
            constants = [fit.B for fit in (fit_bernstein(p, beta) for p in problems) if not fit.vacuous]
        except DegenerateExcess:
            continue
        if not constants or max(constants) <= BOUNDED_B_RATIO * min(constants):
            return beta
    return 0.0


def finite_class_bound(problem: LearningProblem, beta: float, gamma_rule: Optional[GammaRule] = None) -> float:
    """
    3 (2 log|F|) / (v(gamma) n) + 4 gamma, the generalized-Bayes bound with a
    uniform prior, at gamma_rule(n) or the best default grid gamma
    """
    v = VFunction.from_bernstein(fit_bernstein(problem, beta))
    n, log_size = problem.n, math.log(problem.n_predictors)

    def bound(gamma):
        return 6.0 * log_size / (v(gamma) * n) + 4.0 * gamma

    if gamma_rule is not None:
        return bound(gamma_rule(n))
    return min(bound(g) for g in DEFAULT_GAMMA_GRID)


@dataclass
class RateReport:
    """Per-n mean excess risks with the fitted and predicted log-log slopes"""
    n_values: List[int]
    risks: List[float]
    std_errors: List[float]
    methods: List[str]
    bounds: List[float]
    beta: float
    target: float
    slope: Optional[float]
    tolerance: float
    degenerate: bool = False
    estimator: str = ""
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.degenerate:
            return True
        return self.slope is not None and abs(self.slope - self.target) <= self.tolerance

    def rows(self) -> List[Dict[str, Any]]:
        return [{'n': n, 'estimator': self.estimator, 'risk': r, 'std_error': se, 'method': m, 'bound': b}
                for n, r, se, m, b in zip(self.n_values, self.risks, self.std_errors, self.methods, self.bounds)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'estimator': self.estimator,
            'points': self.rows(),
            'beta': self.beta,
            'target': self.target,
            'slope': self.slope,
            'tolerance': self.tolerance,
            'degenerate': self.degenerate,
            'passed': self.passed,
        }


def fit_slope(n_values: Sequence[int], risks: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log risk on log n over the positive risks"""
    n_values, risks = np.asarray(n_values, dtype=float), np.asarray(risks, dtype=float)
    keep = risks > 0
    if keep.sum() < 2:
        return None
    slope, _ = np.polyfit(np.log(n_values[keep]), np.log(risks[keep]), 1)
    return float(slope)


def problem_at(spec: GeneratorSpec, n: int, base: Optional[LearningProblem] = None) -> LearningProblem:
    """
    The spec's problem at sample size n. Threshold grids get GRID_PER_SAMPLE * n
    points, and noise 0 selects the margin schedule h_n = n^(-1/2). Other
    families keep one table across n; pass it as base to skip regeneration.
    """
    if spec.family is GeneratorFamily.THRESHOLD_GRID:
        noise = spec.noise if spec.noise > 0 else n ** -0.5
        return generate(spec.at(m=GRID_PER_SAMPLE * n, n=n, noise=noise))
    return (base if base is not None else generate(spec)).with_sample_size(n)


def rate_experiment(spec: GeneratorSpec, kind: RateEstimator = RateEstimator.ERM,
                    n_list: Optional[Sequence[int]] = None, gamma_rule: Optional[GammaRule] = None,
                    cfg: Optional[McConfig] = None, cap: Optional[int] = None) -> RateReport:
    """
    Fit the excess-risk slope over n_list and compare it with -1/(2 - beta)

    Raises:
        PreconditionFailed: n_list is not strictly increasing or too short
    """
    n_list = [int(n) for n in (n_list or setting('harness.n_list'))]
    if len(n_list) < MIN_SLOPE_POINTS or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise PreconditionFailed(f"need at least {MIN_SLOPE_POINTS} strictly increasing sample sizes")
    cfg = cfg or McConfig.from_config()

    base = None if spec.family is GeneratorFamily.THRESHOLD_GRID else generate(spec)
    problems = [problem_at(spec, n, base) for n in n_list]
    beta = target_beta(problems)
    risks, errors, methods, bounds = [], [], [], []
    for index, problem in enumerate(problems):
        estimate = mean_excess_risk(problem, build_estimator(problem, kind), cfg.stream(index), cap)
        risks.append(estimate.value)
        errors.append(estimate.std_error)
        methods.append(estimate.method.value)
        bounds.append(finite_class_bound(problem, beta, gamma_rule))
        publish(EventType.EXPERIMENT_POINT, n=problem.n, risk=estimate.value, std_error=estimate.std_error)
        logger.info("n=%d: mean excess risk %.6g (se %.2g)", problem.n, estimate.value, estimate.std_error)

    degenerate = all(r <= 0 for r in risks)
    slope = None if degenerate else fit_slope(n_list, risks)
    return RateReport(n_list, risks, errors, methods, bounds, beta, -1.0 / (2.0 - beta), slope,
                      float(setting('harness.slope_tolerance')), degenerate, kind.value,
                      {'family': spec.family.value, 'noise': spec.noise, 'seed': spec.seed})
