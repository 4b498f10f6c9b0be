"""
Two-part MDL
Select a block by empirical loss + prior codelength + block complexity,
then run ERM inside it
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.errors import BadPartition, DegeneratePrior, PreconditionFailed
from src.estimators.base import DeterministicEstimator, EstimatorKind, PriorOverClass
from src.problem.partition import Partition
from src.problem.risk import outcome_counts
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)


class TwoPartMdl(DeterministicEstimator):
    """
    Deterministic two-part estimator.

    For block k let f_k be the within-block ERM. The selected block
    minimizes sum_i l_{f_k}(z_i) + (-log pi_K(k))/eta + comp_bounds[k]
    (ties to the lowest block) and the estimate is f_k of that block.
    """

    def __init__(self, problem: LearningProblem, partition: Partition, pi_K: PriorOverClass,
                 comp_bounds: Sequence[float], eta: float):
        if partition.n_predictors != problem.n_predictors:
            raise BadPartition("partition does not match the predictor class")
        comp_bounds = np.asarray(comp_bounds, dtype=float)
        if pi_K.size != partition.size or comp_bounds.shape != (partition.size,):
            raise BadPartition("one prior mass and one complexity bound per block")
        if not np.all(np.isfinite(comp_bounds)):
            raise BadPartition("complexity bounds must be finite")
        if not eta > 0:
            raise PreconditionFailed("two-part MDL needs eta > 0")

        self.partition = partition
        self.pi_K = pi_K
        self.comp_bounds = comp_bounds
        self.eta = float(eta)
        self._losses_T = np.ascontiguousarray(problem.loss_table.T)
        with np.errstate(divide='ignore'):
            self._block_cost = -pi_K.log_masses / self.eta + comp_bounds
        if np.all(np.isinf(self._block_cost)):
            raise DegeneratePrior("block prior has no mass")

        super().__init__(problem.n_predictors, problem.n_outcomes,
                         count_rule=lambda counts: self.decide(counts)[1],
                         kind=EstimatorKind.TWO_PART_MDL, name="two-part")

    def decide(self, counts: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(selected block, selected predictor, (batch, |K|) criteria) per count row"""
        cumulative = np.atleast_2d(counts) @ self._losses_T
        rows = np.arange(cumulative.shape[0])
        criteria = np.empty((cumulative.shape[0], self.partition.size))
        picks = np.empty_like(criteria, dtype=np.int64)
        for k in range(self.partition.size):
            block = self.partition.indices(k)
            j = np.argmin(cumulative[:, block], axis=1)
            picks[:, k] = block[j]
            criteria[:, k] = cumulative[rows, picks[:, k]] + self._block_cost[k]
        blocks = np.argmin(criteria, axis=1)
        return blocks, picks[rows, blocks], criteria

    def select_block(self, samples: np.ndarray) -> np.ndarray:
        """Index of the selected block per sample"""
        counts = outcome_counts(np.atleast_2d(samples), self.n_outcomes)
        return self.decide(counts)[0]

    def criteria(self, samples: np.ndarray) -> np.ndarray:
        """(batch, |K|) criterion values"""
        counts = outcome_counts(np.atleast_2d(samples), self.n_outcomes)
        return self.decide(counts)[2]


def two_part_mdl(problem: LearningProblem, partition: Partition, pi_K: PriorOverClass,
                 comp_bounds: Sequence[float], eta: Optional[float] = None) -> TwoPartMdl:
    """
    Eta-generalized two-part MDL estimator

    Args:
        problem: The learning problem
        partition: blocks of the predictor class
        pi_K: prior over blocks
        comp_bounds: upper bounds on comp(F_k, ERM_k), one per block
        eta: learning rate (problem eta when None)

    Raises:
        BadPartition: partition or per-block inputs do not fit the class
    """
    eta = problem.eta if eta is None else float(eta)
    estimator = TwoPartMdl(problem, partition, pi_K, comp_bounds, eta)
    logger.debug("two-part MDL over %d blocks at eta=%g", partition.size, eta)
    return estimator
