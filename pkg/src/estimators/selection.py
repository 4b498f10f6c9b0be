"""
Learning-rate Selection
Plain grid search over eta on held-out data; a stand-in for safe-Bayes
style selection, not an implementation of it
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable

import numpy as np

from src.core.errors import EmptyGrid, PreconditionFailed
from src.estimators.base import Estimator, as_randomized
from src.measure.enumerator import ProductMeasure
from src.measure.montecarlo import McConfig, draw_samples
from src.problem.risk import outcome_counts
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)

EstimatorFamily = Callable[[float], Estimator]


@dataclass(frozen=True)
class ValidationSplit:
    """Each trial draws train_size + validate_size outcomes from P and splits them in order"""
    train_size: int
    validate_size: int
    trials: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.train_size < 1 or self.validate_size < 1:
            raise PreconditionFailed("train and validation parts must be nonempty")
        if self.trials < 1:
            raise PreconditionFailed("validation needs at least one trial")


@dataclass
class EtaSelection:
    eta: float
    scores: Dict[float, float] = field(default_factory=dict)


def eta_grid_select(problem: LearningProblem, family: EstimatorFamily, grid: Iterable[float],
                    split: ValidationSplit) -> EtaSelection:
    """
    Pick the grid eta whose estimator has the smallest held-out loss

    Every grid point is scored on the same seeded draws: the estimator is
    fit on the train part and scored by the posterior-expected cumulative
    loss on the validation part, averaged over trials.

    Args:
        problem: The learning problem (P and the loss table)
        family: eta -> estimator
        grid: candidate learning rates
        split: train/validation sizes, trials and seed

    Returns:
        The selected eta (ties to the smaller eta) and every grid score

    Raises:
        EmptyGrid: no grid points
    """
    grid = sorted({float(eta) for eta in grid})
    if not grid:
        raise EmptyGrid("eta grid is empty")

    measure = ProductMeasure.of_problem(problem, n=split.train_size + split.validate_size)
    draws = draw_samples(measure, McConfig(split.trials, split.seed))
    train, validate = draws[:, :split.train_size], draws[:, split.train_size:]
    validation_losses = outcome_counts(validate, problem.n_outcomes) @ problem.loss_table.T

    scores: Dict[float, float] = {}
    best_eta, best_score = grid[0], np.inf
    for eta in grid:
        posterior = as_randomized(family(eta)).posterior(train)
        score = float(np.mean(np.sum(posterior * validation_losses, axis=1)))
        scores[eta] = score
        logger.debug("eta=%g held-out loss %.6g", eta, score)
        if score < best_score:
            best_eta, best_score = eta, score

    logger.info("selected eta=%g from %d grid points", best_eta, len(grid))
    return EtaSelection(best_eta, scores)
