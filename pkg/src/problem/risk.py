"""
Risk and Excess Loss
Expected losses, excess losses R_f and outcome counts of samples
"""

from typing import Sequence

import numpy as np

from src.core.errors import IndexOutOfRange
from src.problem.types import LearningProblem


def risk(problem: LearningProblem, f: int) -> float:
    """
    Expected loss of predictor f under the true distribution

    Args:
        problem: The learning problem
        f: Predictor index

    Returns:
        sum_z P(z) l_f(z)
    """
    f = problem.predictors.check_index(f)
    return float(problem.loss_table[f] @ problem.p_true.masses)


def risks(problem: LearningProblem) -> np.ndarray:
    """Risk of every predictor"""
    return problem.loss_table @ problem.p_true.masses


def excess_risks(problem: LearningProblem) -> np.ndarray:
    """E_P[R_f(Z)] for every predictor; zero at f*"""
    r = risks(problem)
    return r - r[problem.fstar_index]


def excess_loss_table(problem: LearningProblem) -> np.ndarray:
    """R_f(z) = l_f(z) - l_f*(z) for every predictor and outcome"""
    return problem.loss_table - problem.loss_table[problem.fstar_index]


def check_sample(problem: LearningProblem, zsample: Sequence[int]) -> np.ndarray:
    zsample = np.asarray(zsample, dtype=np.int64).reshape(-1)
    if zsample.size > problem.n:
        raise IndexOutOfRange(f"sample of length {zsample.size} exceeds n = {problem.n}")
    if zsample.size and (zsample.min() < 0 or zsample.max() >= problem.n_outcomes):
        raise IndexOutOfRange(f"outcome index outside 0..{problem.n_outcomes - 1}")
    return zsample


def excess_loss(problem: LearningProblem, f: int, zsample: Sequence[int]) -> float:
    """
    Excess loss of f on a sample: R_f(z^n) = sum_i l_f(z_i) - l_f*(z_i)

    The empty sample has excess loss 0.
    """
    f = problem.predictors.check_index(f)
    zsample = check_sample(problem, zsample)
    return float(excess_loss_table(problem)[f, zsample].sum())


def outcome_counts(samples: np.ndarray, n_outcomes: int) -> np.ndarray:
    """
    Count matrix of a batch of samples

    Args:
        samples: (batch, n) outcome indices
        n_outcomes: |Z|

    Returns:
        (batch, |Z|) float counts
    """
    samples = np.atleast_2d(samples)
    counts = np.zeros((samples.shape[0], n_outcomes))
    rows = np.repeat(np.arange(samples.shape[0]), samples.shape[1])
    np.add.at(counts, (rows, samples.reshape(-1)), 1.0)
    return counts


def cumulative_losses(problem: LearningProblem, counts: np.ndarray) -> np.ndarray:
    """sum_i l_f(z_i) per sample (rows of counts) and predictor"""
    return counts @ problem.loss_table.T


def sample_excess_losses(problem: LearningProblem, counts: np.ndarray) -> np.ndarray:
    """R_f(z^n) per sample (rows of counts) and predictor"""
    return counts @ excess_loss_table(problem).T
