"""
Complexity Decompositions
Partition bounds, composite luckiness decompositions and the per-sample
two-part MDL bound, all certified by exact enumeration
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp, rel_entr

from src.core.config import tolerance
from src.core.errors import BadPartition, PreconditionFailed
from src.core.events import EventType, publish
from src.core.results import VerificationResult, inequality_result
from src.complexity.luckiness import LuckinessFunction, block_masses
from src.complexity.shtarkov import comp_max, log_integrand, sample_complexities
from src.entropify.model import EntropifiedModel
from src.estimators.base import (
    DeterministicEstimator,
    Estimator,
    EstimatorKind,
    PriorOverClass,
    RandomizedEstimator,
    as_randomized,
)
from src.estimators.erm import erm_within
from src.estimators.mdl import TwoPartMdl, two_part_mdl
from src.measure.enumerator import ProductMeasure, SampleChunk, SampleEnumerator, exact_log_expectation
from src.measure.logspace import masked_expectation
from src.problem.partition import Partition
from src.problem.risk import outcome_counts, risks

logger = logging.getLogger(__name__)


def _check_partition(model: EntropifiedModel, partition: Partition):
    if partition.n_predictors != model.n_predictors:
        raise BadPartition(f"partition covers {partition.n_predictors} predictors, class has {model.n_predictors}")


def _log_shtarkov(model: EntropifiedModel, est: Estimator, w: Optional[LuckinessFunction],
                  chunk: SampleChunk) -> float:
    return float(logsumexp(chunk.log_weight + log_integrand(model, est, w, chunk.samples)))


def _per_sample_result(name: str, lhs: np.ndarray, rhs: np.ndarray, **details) -> VerificationResult:
    with np.errstate(invalid='ignore'):
        slack = np.where(lhs == rhs, 0.0, rhs - lhs)
    worst = int(np.argmin(slack))
    details.setdefault('samples', int(lhs.size))
    details['worst_sample'] = worst
    return inequality_result(name, lhs[worst], rhs[worst], tolerance('inequality'), **details)


# Partition bound

def partition_bound_check(model: EntropifiedModel, partition: Partition, est: DeterministicEstimator,
                          cap: Optional[int] = None) -> VerificationResult:
    """
    Check comp(F, f_hat) <= log|K|/eta + max_k comp(F_k)

    Block complexities are maximal complexities of the entropified blocks.
    """
    _check_partition(model, partition)
    if not isinstance(est, DeterministicEstimator):
        raise PreconditionFailed("the partition bound is stated for deterministic estimators")
    block_comps = [comp_max(model, partition.indices(k), cap=cap).comp for k in range(partition.size)]
    measure = ProductMeasure.of_problem(model.problem)
    lhs = exact_log_expectation(measure, lambda s: log_integrand(model, est, None, s), cap=cap) / model.eta
    rhs = math.log(partition.size) / model.eta + max(block_comps)
    return inequality_result("partition bound", lhs, rhs, tolerance('inequality'),
                             blocks=partition.size, block_comps=block_comps)


# Composite luckiness

def block_conditional(est: Estimator, partition: Partition, k: int) -> RandomizedEstimator:
    """
    Pi_hat restricted to block k and renormalized; uniform on the block at
    samples where the block carries no posterior mass
    """
    est = as_randomized(est)
    columns = partition.indices(k)

    def restrict(posterior: np.ndarray) -> np.ndarray:
        inside = posterior[:, columns]
        mass = inside.sum(axis=1)
        empty = mass <= 0
        conditional = np.zeros_like(posterior)
        with np.errstate(invalid='ignore', divide='ignore'):
            conditional[:, columns] = np.where(empty[:, None], 1.0 / columns.size, inside / mass[:, None])
        if np.any(empty):
            logger.debug("block %d has no posterior mass on %d samples; using uniform", k, int(empty.sum()))
            publish(EventType.ZERO_POSTERIOR_BLOCK, block=k, samples=int(empty.sum()))
        return conditional

    return RandomizedEstimator(
        est.n_predictors, est.n_outcomes,
        count_rule=(lambda counts: restrict(est.posterior_counts(counts))) if est.count_based else None,
        sample_rule=None if est.count_based else (lambda samples: restrict(est.posterior(samples))),
        kind=EstimatorKind.BLOCK_CONDITIONAL, name=f"{est.name}|block{k}",
    )


def composite_decomposition_check(model: EntropifiedModel, partition: Partition, pi_K: PriorOverClass,
                                  sub_w: Sequence[Optional[LuckinessFunction]], est: Estimator,
                                  cap: Optional[int] = None) -> VerificationResult:
    """
    Check comp(F, Pi_hat, w, z^n) <= KL(Pi_hat_K | z^n || pi_K)/eta
    + E_{k ~ Pi_hat_K}[comp(F_k, Pi_hat|k, w_k, z^n)] at every sample

    Each w_k is scaled by 1/S(F_k, Pi_hat|k, w_k) before the global
    w = w_k pi_K(k) / pi_hat_K(k | z^n) is assembled. Block complexities are
    unchanged by the scaling and the bound then holds sample by sample; the
    worst slack with unscaled w_k is reported as raw_slack.

    Raises:
        BadPartition: partition, pi_K or sub_w do not match the class
        PreconditionFailed: pi_K vanishes on a block with posterior mass
    """
    _check_partition(model, partition)
    if pi_K.size != partition.size or len(sub_w) != partition.size:
        raise BadPartition("one block prior mass and one sub-luckiness per block")
    sub_w = [w if w is not None else LuckinessFunction.constant(model.n_predictors) for w in sub_w]
    est = as_randomized(est)
    chunk = SampleEnumerator(model.problem, cap=cap).materialize()
    samples = chunk.samples

    posterior = est.posterior(samples)
    block_post = block_masses(posterior, partition)
    kl_terms = rel_entr(block_post, pi_K.masses[None, :])
    if np.any(np.isinf(kl_terms)):
        raise PreconditionFailed("pi_K vanishes on a block that receives posterior mass")
    kl = kl_terms.sum(axis=1)

    log_s_blocks = np.empty(partition.size)
    block_comps = np.empty((len(chunk), partition.size))
    for k in range(partition.size):
        conditional = block_conditional(est, partition, k)
        log_s_blocks[k] = _log_shtarkov(model, conditional, sub_w[k], chunk)
        block_comps[:, k] = sample_complexities(model, conditional, sub_w[k], samples, log_s_blocks[k])[0]
    rhs = kl / model.eta + masked_expectation(block_post, block_comps)

    def lhs_for(log_scales) -> Tuple[np.ndarray, float]:
        w = LuckinessFunction.composite(partition, pi_K, sub_w, est, log_scales=log_scales)
        log_s = _log_shtarkov(model, est, w, chunk)
        return sample_complexities(model, est, w, samples, log_s)[0], log_s

    lhs, log_s = lhs_for(-log_s_blocks)
    raw_lhs, raw_log_s = lhs_for(None)
    with np.errstate(invalid='ignore'):
        raw_slack = float(np.min(np.where(raw_lhs == rhs, 0.0, rhs - raw_lhs)))

    return _per_sample_result("composite decomposition", lhs, rhs, log_shtarkov=log_s,
                              block_log_shtarkov=log_s_blocks, raw_log_shtarkov=raw_log_s,
                              raw_slack=raw_slack)


# Two-part MDL

def exact_block_bounds(model: EntropifiedModel, partition: Partition, cap: Optional[int] = None) -> np.ndarray:
    """comp(F_k, ERM_k) for every block, by exact enumeration"""
    _check_partition(model, partition)
    measure = ProductMeasure.of_problem(model.problem)
    bounds = []
    for k in range(partition.size):
        est = erm_within(model.problem, partition.indices(k))
        log_s = exact_log_expectation(measure, lambda s, e=est: log_integrand(model, e, None, s), cap=cap)
        bounds.append(log_s / model.eta)
    return np.asarray(bounds)


def best_block(model: EntropifiedModel, partition: Partition, pi_K: PriorOverClass) -> Tuple[int, int]:
    """
    k*: among blocks holding a risk minimizer, the one with the largest
    pi_K mass (ties to the lowest block); with the risk minimizer inside it
    """
    r = risks(model.problem)
    minimizers = np.flatnonzero(r <= r.min() + 1e-12)
    owner = partition.block_of
    candidates = sorted({int(owner[f]) for f in minimizers})
    k_star = max(candidates, key=lambda k: (pi_K.masses[k], -k))
    inside = [int(f) for f in minimizers if owner[f] == k_star]
    return k_star, min(inside)


def two_part_bound_check(model: EntropifiedModel, partition: Partition, pi_K: PriorOverClass,
                         comp_bounds: Sequence[float], est: Optional[TwoPartMdl] = None,
                         cap: Optional[int] = None) -> VerificationResult:
    """
    Check comp_full(F, f_two_part, w, z^n) <= -log pi_K(k*)/eta + comp_bounds[k*]
    at every sample

    w(z^n) = pi_K(k(z^n)) exp(-eta comp_bounds[k(z^n)]) for the selected block
    k(z^n). Excess losses are taken relative to the risk minimizer inside k*.
    The bound holds whenever comp_bounds dominate the block ERM complexities.
    """
    _check_partition(model, partition)
    comp_bounds = np.asarray(comp_bounds, dtype=float)
    est = est or two_part_mdl(model.problem, partition, pi_K, comp_bounds, model.eta)
    if not isinstance(est, TwoPartMdl):
        raise PreconditionFailed("two-part bound needs a two-part MDL estimator")
    k_star, reference = best_block(model, partition, pi_K)

    chunk = SampleEnumerator(model.problem, cap=cap).materialize()
    counts = outcome_counts(chunk.samples, model.problem.n_outcomes)
    blocks, picks, _ = est.decide(counts)
    rows = np.arange(len(chunk))

    with np.errstate(divide='ignore'):
        block_cost = -pi_K.log_masses + model.eta * comp_bounds
    excess = model.excess_losses(chunk.samples)[rows, picks]
    log_terms = -model.eta * excess - model.log_normalizers[picks] - block_cost[blocks]
    log_s = float(logsumexp(chunk.log_weight + log_terms))

    cumulative = counts @ model.problem.loss_table.T
    comp = (block_cost[blocks] + log_s) / model.eta
    full = comp + cumulative[rows, picks] - cumulative[:, reference]
    bound = -pi_K.log_masses[k_star] / model.eta + comp_bounds[k_star]
    return _per_sample_result("two-part bound", full, np.full(full.shape, bound), k_star=k_star,
                              reference=reference, log_shtarkov=log_s)

