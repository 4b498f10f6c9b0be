"""
Complexity Chain
Certify, by enumeration, the chain bounding the maximal complexity of a
class by H-local and Rademacher complexities over a Voronoi partition
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from src.core.config import tolerance
from src.core.constants import EULER
from src.core.errors import DiameterViolated, PreconditionFailed
from src.core.results import VerificationResult, combine_results, inequality_result
from src.complexity.shtarkov import comp_max
from src.empirical.covering import CoverResult, covering_number
from src.empirical.local import check_cell, h_local, loss_class, t_n_log_moment
from src.empirical.metrics import Pseudometric, diameter, distance_matrix
from src.empirical.rademacher import rademacher
from src.entropify.model import EntropifiedModel

logger = logging.getLogger(__name__)


def _require_moderate_eta(model: EntropifiedModel):
    if model.eta > 1.0:
        raise PreconditionFailed(f"the concentration step needs eta <= 1, got {model.eta:g}")


def verify_opper_haussler(model: EntropifiedModel, f0: int, cell: Sequence[int],
                          cap: Optional[int] = None) -> VerificationResult:
    """comp_max(cell) <= (1/eta) log E_{Q_f0}[exp(eta T_n)], the cell standing in for the class"""
    cell = check_cell(model, f0, cell)
    lhs = comp_max(model, block=cell, cap=cap).comp
    rhs = t_n_log_moment(model, f0, cell, cap=cap) / model.eta
    return inequality_result("opper-haussler", lhs, rhs, tolerance('inequality'),
                             f0=int(f0), cell=cell.tolist())


def verify_talagrand_moment(model: EntropifiedModel, f0: int, cell: Sequence[int],
                            epsilon: Optional[float] = None, cap: Optional[int] = None) -> VerificationResult:
    """
    log E_{Q_f0}[exp(eta T_n)] <= 3 eta E_{Q_f0}[T_n] + n eta^2 sigma^2

    sigma uses the measured diameter of the cell; a nominal epsilon, when
    given, must bound that diameter.

    Raises:
        DiameterViolated: the cell is wider than epsilon
        PreconditionFailed: eta > 1
    """
    _require_moderate_eta(model)
    cell = check_cell(model, f0, cell)
    measured = diameter(model, Pseudometric.l2p(), cell)
    if epsilon is not None and measured > epsilon + tolerance('inequality'):
        raise DiameterViolated(f"cell diameter {measured:.6g} exceeds epsilon {epsilon:.6g}")
    sigma = EULER * model.problem.lipschitz_L * measured
    eta, n = model.eta, model.n

    lhs = t_n_log_moment(model, f0, cell, cap=cap)
    mean = h_local(model, f0, cell, cap=cap).value
    rhs = 3.0 * eta * mean + n * eta ** 2 * sigma ** 2
    return inequality_result("talagrand moment", lhs, rhs, tolerance('inequality'),
                             f0=int(f0), sigma=sigma, diameter=measured, epsilon=epsilon)


def verify_symmetrization(model: EntropifiedModel, f0: int, cell: Sequence[int], n: Optional[int] = None,
                          cap: Optional[int] = None) -> VerificationResult:
    """E_{Q_f0}[T_n] <= 2 n E_{Q_f0}[R_n(G)] with G the loss class of the cell centered at f0"""
    cell = check_cell(model, f0, cell)
    n = model.n if n is None else int(n)
    local = h_local(model, f0, cell, n=n, cap=cap)
    rad = rademacher(model, loss_class(model, f0, cell), n=n, f0=f0, cap=cap)
    tol = tolerance('inequality')
    if local.std_error or rad.std_error:
        tol = tolerance('mc_sigmas') * math.hypot(local.std_error, 2 * n * rad.std_error)
    return inequality_result("symmetrization", local.value, 2 * n * rad.value, tol,
                             f0=int(f0), method=local.method.value)


def lemma_sigma_factor(model: EntropifiedModel) -> float:
    """e L for eta <= 1, e^eta L above"""
    factor = EULER if model.eta <= 1.0 else math.exp(model.eta)
    return factor * model.problem.lipschitz_L


def verify_lemma_sigma(model: EntropifiedModel) -> VerificationResult:
    """
    ||l_f - l_g||_{L2(Q_f0)} <= factor ||f - g||_{L2(P)} over every pair (f, g)
    and every reference f0; the result carries the tightest triple.
    """
    factor = lemma_sigma_factor(model)
    base = factor * distance_matrix(model, Pseudometric.l2p())
    worst = None
    for f0 in range(model.n_predictors):
        switched = distance_matrix(model, Pseudometric.l2q(f0))
        gap = switched - base
        f, g = np.unravel_index(np.argmax(gap), gap.shape)
        if worst is None or gap[f, g] > worst[0]:
            worst = (gap[f, g], f0, int(f), int(g), switched[f, g], base[f, g])
    _, f0, f, g, lhs, rhs = worst
    return inequality_result("lemma sigma", lhs, rhs, tolerance('inequality'),
                             f0=f0, pair=(f, g), factor=factor)


def verify_oht(model: EntropifiedModel, epsilon: float, cap: Optional[int] = None,
               cover: Optional[CoverResult] = None) -> VerificationResult:
    """
    With an epsilon/2 cover in L2(P) and its Voronoi cells F_k around centers f_k:

        comp_max(F) <= log N / eta + max_k (3 E_{Q_fk}[T_n^k] + eta n sigma_k^2)
                    <= log N / eta + max_k (6 n E_{Q_fk}[R_n(G_k)] + eta n sigma_k^2)

    sigma_k = e L diam(F_k) with the measured diameter; both displays are
    checked against comp_max(F).
    """
    _require_moderate_eta(model)
    if not epsilon > 0:
        raise PreconditionFailed("epsilon must be positive")
    cover = cover or covering_number(model, Pseudometric.l2p(), epsilon / 2.0, exact=False)
    eta, n = model.eta, model.n
    lhs = comp_max(model, cap=cap).comp

    local_terms, rad_terms, diameters = [], [], []
    for k, center in enumerate(cover.centers):
        cell = cover.members(k)
        measured = diameter(model, Pseudometric.l2p(), cell)
        spread = eta * n * (EULER * model.problem.lipschitz_L * measured) ** 2
        local_terms.append(3.0 * h_local(model, center, cell, cap=cap).value + spread)
        rad = rademacher(model, loss_class(model, center, cell), f0=center, cap=cap)
        rad_terms.append(6.0 * n * rad.value + spread)
        diameters.append(measured)
    overhead = math.log(cover.size) / eta
    if max(diameters) > epsilon + tolerance('inequality'):
        logger.warning("Voronoi cell diameter %.6g exceeds nominal epsilon %.6g", max(diameters), epsilon)
    logger.debug("oht at eps=%g: %d cells, measured diameters %s", epsilon, cover.size, diameters)

    tol = tolerance('inequality')
    parts = [
        inequality_result("oht: h-local", lhs, overhead + max(local_terms), tol),
        inequality_result("oht: rademacher", lhs, overhead + max(rad_terms), tol),
    ]
    return combine_results("oht", parts, tol, epsilon=epsilon, cells=cover.size,
                           diameters=diameters, centers=list(cover.centers))
