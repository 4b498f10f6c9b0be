"""
H-local Complexity
The f0-centered supremum process T_n over a cell and its expectation under
the entropified distribution Q_f0
"""

import logging
from typing import Optional, Sequence

import numpy as np

from src.core.errors import PreconditionFailed
from src.entropify.model import EntropifiedModel
from src.measure.enumerator import exact_log_expectation
from src.measure.montecarlo import Estimate, McConfig, expectation
from src.problem.risk import check_sample, outcome_counts

logger = logging.getLogger(__name__)


def check_cell(model: EntropifiedModel, f0: int, cell: Sequence[int]) -> np.ndarray:
    predictors = model.problem.predictors
    cell = np.asarray([predictors.check_index(f) for f in cell], dtype=np.int64)
    if predictors.check_index(f0) not in cell:
        raise PreconditionFailed(f"reference predictor {f0} is not in the cell")
    return cell


def loss_class(model: EntropifiedModel, f0: int, cell: Sequence[int]) -> np.ndarray:
    """(|cell|, |Z|) table of l_f0 - l_f for f in the cell"""
    cell = check_cell(model, f0, cell)
    losses = model.problem.loss_table
    return losses[f0][None, :] - losses[cell]


def t_n_values(model: EntropifiedModel, f0: int, cell: Sequence[int], samples: np.ndarray) -> np.ndarray:
    """
    T_n = max_{f in cell} [sum_j (l_f0 - l_f)(Z_j) - E_{Q_f0} sum_j (l_f0 - l_f)]
    for each sample of a (batch, n) array
    """
    table = loss_class(model, f0, cell)
    samples = np.atleast_2d(samples)
    centered = table - (table @ model.q_masses(f0))[:, None]
    counts = outcome_counts(samples, model.problem.n_outcomes)
    return (counts @ centered.T).max(axis=1)


def t_n_value(model: EntropifiedModel, f0: int, cell: Sequence[int], zsample: Sequence[int]) -> float:
    zsample = check_sample(model.problem, zsample)
    return float(t_n_values(model, f0, cell, zsample[None, :])[0])


def h_local(model: EntropifiedModel, f0: int, cell: Sequence[int], n: Optional[int] = None,
            cfg: Optional[McConfig] = None, cap: Optional[int] = None) -> Estimate:
    """H-local complexity E_{Z^n ~ Q_f0}[T_n]; nonnegative since f0 is in the cell"""
    check_cell(model, f0, cell)
    source = model.entropified_measure(f0, n)
    return expectation(source, lambda samples: t_n_values(model, f0, cell, samples), cfg=cfg, cap=cap)


def t_n_log_moment(model: EntropifiedModel, f0: int, cell: Sequence[int], n: Optional[int] = None,
                   cap: Optional[int] = None) -> float:
    """log E_{Z^n ~ Q_f0}[exp(eta T_n)], exact only"""
    check_cell(model, f0, cell)
    eta = model.eta
    return exact_log_expectation(model.entropified_measure(f0, n),
                                 lambda samples: eta * t_n_values(model, f0, cell, samples), cap=cap)
