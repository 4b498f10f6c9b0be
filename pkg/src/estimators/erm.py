"""
Empirical Risk Minimization
Plain, block-restricted and penalized ERM over a finite class
"""

from typing import Optional, Sequence

import numpy as np

from src.core.errors import PreconditionFailed
from src.estimators.base import DeterministicEstimator, EstimatorKind, PenaltyFunction
from src.problem.types import LearningProblem


def _argmin_rows(scores: np.ndarray) -> np.ndarray:
    # np.argmin returns the first minimizer: ties go to the lowest index
    return np.argmin(scores, axis=1)


def erm(problem: LearningProblem) -> DeterministicEstimator:
    """z^n -> argmin_f sum_i l_f(z_i), ties to the lowest index"""
    losses_T = np.ascontiguousarray(problem.loss_table.T)
    return DeterministicEstimator(
        problem.n_predictors, problem.n_outcomes,
        count_rule=lambda counts: _argmin_rows(counts @ losses_T),
        kind=EstimatorKind.ERM, name="erm",
    )


def erm_within(problem: LearningProblem, block: Sequence[int], name: Optional[str] = None) -> DeterministicEstimator:
    """ERM restricted to a subset of predictors (indices into the full class)"""
    block = np.asarray(block, dtype=np.int64)
    if block.size == 0:
        raise PreconditionFailed("ERM over an empty block")
    sub_T = np.ascontiguousarray(problem.loss_table[block].T)
    return DeterministicEstimator(
        problem.n_predictors, problem.n_outcomes,
        count_rule=lambda counts: block[_argmin_rows(counts @ sub_T)],
        kind=EstimatorKind.ERM, name=name or f"erm{list(block)}",
    )


def penalized_erm(problem: LearningProblem, gamma: PenaltyFunction, eta: Optional[float] = None) -> DeterministicEstimator:
    """
    Penalized empirical risk minimizer

    Args:
        problem: The learning problem
        gamma: penalty Gamma(f) per predictor
        eta: learning rate (problem eta when None)

    Returns:
        z^n -> argmin_f [sum_i l_f(z_i) + Gamma(f)/eta], ties to the lowest index
    """
    eta = problem.eta if eta is None else float(eta)
    if not eta > 0:
        raise PreconditionFailed("penalized ERM needs eta > 0")
    if gamma.gamma.size != problem.n_predictors:
        raise PreconditionFailed("one penalty value per predictor")
    losses_T = np.ascontiguousarray(problem.loss_table.T)
    offset = gamma.gamma / eta
    estimator = DeterministicEstimator(
        problem.n_predictors, problem.n_outcomes,
        count_rule=lambda counts: _argmin_rows(counts @ losses_T + offset[None, :]),
        kind=EstimatorKind.PENALIZED_ERM, name="penalized",
    )
    estimator.penalty = gamma
    estimator.eta = eta
    return estimator
