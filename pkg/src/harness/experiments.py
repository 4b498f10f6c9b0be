"""
Experiments
The NML equalizer property and two-part MDL model selection on nested blocks
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.config import tolerance
from src.core.errors import NotLogLoss, PreconditionFailed
from src.core.events import EventType, publish
from src.core.results import VerificationResult, combine_results, identity_result
from src.complexity.decomposition import best_block, exact_block_bounds, two_part_bound_check
from src.complexity.luckiness import LuckinessFunction, LuckinessKind
from src.complexity.nml import nml_density, nml_regret, spread
from src.complexity.shtarkov import log_integrand
from src.entropify.model import entropify
from src.estimators.base import DeterministicEstimator, Estimator, PriorOverClass
from src.estimators.erm import erm, erm_within
from src.estimators.mdl import two_part_mdl
from src.harness.generators import GeneratorSpec
from src.harness.rates import mean_excess_risk, problem_at
from src.measure.enumerator import SampleEnumerator
from src.measure.montecarlo import McConfig
from src.problem.risk import outcome_counts
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)


@dataclass
class EqualizerReport:
    estimator: str
    luckiness: str
    spread: float
    constant: float
    log_shtarkov: float
    samples: int
    result: VerificationResult

    @property
    def passed(self) -> bool:
        return self.result.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            'estimator': self.estimator,
            'luckiness': self.luckiness,
            'spread': self.spread,
            'constant': self.constant,
            'log_shtarkov': self.log_shtarkov,
            'samples': self.samples,
            'passed': self.passed,
        }


def equalizer_experiment(problem: LearningProblem, est: Estimator, w: Optional[LuckinessFunction] = None,
                         cap: Optional[int] = None) -> EqualizerReport:
    """
    Regret of the luckiness-NML strategy on every sample of Z^n

    With a penalty luckiness the regret is taken against the penalized
    code, -log r_w(z^n) - min_f(-log p_f(z^n) + Gamma(f)), which needs a
    correct log-loss model at eta = 1. Otherwise it is taken against the
    selected code q_f_hat(z^n) w(z^n) (or its generalized form for
    randomized estimators). Either way it should be constant, equal to log S.

    Raises:
        NotLogLoss: penalty luckiness on a problem that is not log-loss at eta = 1
    """
    model = entropify(problem)
    nml = nml_density(model, est, w, cap=cap)
    if w is not None and w.kind is LuckinessKind.PENALTY:
        if not problem.is_log_loss or model.eta != 1.0:
            raise NotLogLoss("the penalized equalizer needs a log-loss problem at eta = 1")
        counts = outcome_counts(nml.samples, problem.n_outcomes)
        codes = counts @ problem.loss_table.T + w.gamma.gamma[None, :]
        regret = nml.regret(-codes.min(axis=1))
    elif isinstance(est, DeterministicEstimator):
        regret = nml_regret(model, est, w, nml=nml)
    else:
        log_p = problem.p_true.log_masses[nml.samples].sum(axis=1)
        regret = nml.regret(log_p - nml.log_nu + log_integrand(model, est, w, nml.samples))

    width = spread(regret)
    constant = float(regret.mean()) if regret.size else 0.0
    tol = tolerance('identity')
    result = combine_results(
        "equalizer",
        [identity_result("equalizer: spread", width, 0.0, tolerance('equalizer')),
         identity_result("equalizer: constant", constant, nml.log_shtarkov, tol),
         identity_result("equalizer: total mass", nml.total_mass(), 1.0, tolerance('normalization'))],
        tol, estimator=est.name, spread=width)
    logger.debug("equalizer for %s: spread %.3g, constant %.12g", est.name, width, constant)
    return EqualizerReport(est.name, 'none' if w is None else w.kind.value, width, constant,
                           nml.log_shtarkov, int(regret.size), result)


@dataclass
class SelectionPoint:
    n: int
    two_part: float
    erm_full: float
    erm_best_block: float
    overhead: float
    selected_blocks: List[float]
    bound: VerificationResult

    @property
    def within_overhead(self) -> bool:
        return self.two_part <= self.erm_best_block + self.overhead + tolerance('inequality')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'two_part': self.two_part,
            'erm_full': self.erm_full,
            'erm_best_block': self.erm_best_block,
            'overhead': self.overhead,
            'within_overhead': self.within_overhead,
            'selected_blocks': self.selected_blocks,
            'bound_passed': self.bound.passed,
            'bound_slack': self.bound.slack,
        }


@dataclass
class ModelSelectReport:
    k_star: int
    points: List[SelectionPoint] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.bound.passed for p in self.points)

    def rows(self) -> List[Dict[str, Any]]:
        return [p.to_dict() for p in self.points]

    def to_dict(self) -> Dict[str, Any]:
        return {'k_star': self.k_star, 'points': self.rows(), 'passed': self.passed}


def model_select_experiment(spec: GeneratorSpec, pi_K: PriorOverClass, n_list: Sequence[int],
                            cfg: Optional[McConfig] = None, cap: Optional[int] = None) -> ModelSelectReport:
    """
    Two-part MDL against ERM on the whole class and ERM on the best block k*

    Block complexities are computed exactly at every n, the two-part bound is
    verified on every enumerated sample, and the mean excess risks of the
    three estimators are reported with the -log pi_K(k*)/eta overhead.
    """
    partition = spec.partition()
    if pi_K.size != partition.size:
        raise PreconditionFailed("one block prior mass per block")
    if not n_list:
        raise PreconditionFailed("no sample sizes given")
    report = None
    for index, n in enumerate(n_list):
        problem = problem_at(spec, int(n))
        model = entropify(problem)
        comp_bounds = exact_block_bounds(model, partition, cap=cap)
        two_part = two_part_mdl(problem, partition, pi_K, comp_bounds)
        k_star, _ = best_block(model, partition, pi_K)
        report = report or ModelSelectReport(k_star)
        stream = (cfg or McConfig.from_config()).stream(index)

        bound = two_part_bound_check(model, partition, pi_K, comp_bounds, two_part, cap=cap)
        mass = pi_K.masses[k_star]
        overhead = -math.log(mass) / model.eta if mass > 0 else math.inf
        blocks = _selected_block_frequencies(two_part, problem, cap)
        point = SelectionPoint(
            n=problem.n,
            two_part=mean_excess_risk(problem, two_part, stream, cap).value,
            erm_full=mean_excess_risk(problem, erm(problem), stream, cap).value,
            erm_best_block=mean_excess_risk(problem, erm_within(problem, partition.indices(k_star)), stream, cap).value,
            overhead=overhead,
            selected_blocks=blocks,
            bound=bound,
        )
        report.points.append(point)
        publish(EventType.EXPERIMENT_POINT, n=point.n, two_part=point.two_part, erm_full=point.erm_full)
    return report


def _selected_block_frequencies(est, problem: LearningProblem, cap: Optional[int]) -> List[float]:
    """P(two-part selects block k) under P^n, by enumeration"""
    chunk = SampleEnumerator(problem, cap=cap).materialize()
    blocks = est.select_block(chunk.samples)
    weights = np.exp(chunk.log_weight)
    return np.bincount(blocks, weights=weights, minlength=est.partition.size).tolist()
