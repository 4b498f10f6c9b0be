"""
Extended Haussler Check
The L2(P) covering number at epsilon against empirical covering numbers at
epsilon/2 over a budget of point sets
"""

import logging
from typing import Iterator, Optional

import numpy as np

from src.core.config import tolerance
from src.core.constants import EXACT_COVER_MAX, HAUSSLER_BUDGET
from src.core.errors import PreconditionFailed
from src.core.results import CheckStatus, VerificationResult, inequality_result
from src.empirical.covering import minimal_cover_size
from src.empirical.metrics import Pseudometric, distance_matrix
from src.entropify.model import EntropifiedModel
from src.measure.montecarlo import McConfig

logger = logging.getLogger(__name__)


def candidate_point_sets(model: EntropifiedModel, budget: int, cfg: McConfig) -> Iterator[np.ndarray]:
    """
    Every single outcome, the support of P once, then budget multisets drawn
    from P with sizes uniform in [1, 4 |support|]
    """
    problem = model.problem
    for z in range(problem.n_outcomes):
        yield np.array([z])
    support = problem.p_true.support
    yield support
    rng = cfg.generator()
    masses = problem.p_true.masses
    for _ in range(budget):
        size = int(rng.integers(1, 4 * support.size + 1))
        yield rng.choice(problem.n_outcomes, size=size, p=masses)


def extended_haussler_check(model: EntropifiedModel, epsilon: float, sample_budget: int = HAUSSLER_BUDGET,
                            cfg: Optional[McConfig] = None) -> VerificationResult:
    """
    N(F, L2(P), epsilon) <= max over point sets of N(F, L2(P_n), epsilon/2)

    Both sides are exact minimal internal covers. A budget that finds no
    witnessing point set makes the check inconclusive, never failed.
    """
    if model.n_predictors > EXACT_COVER_MAX:
        raise PreconditionFailed(f"exact covering limited to {EXACT_COVER_MAX} predictors")
    if not epsilon > 0:
        raise PreconditionFailed("epsilon must be positive")
    cfg = cfg or McConfig.from_config()

    target = minimal_cover_size(distance_matrix(model, Pseudometric.l2p()), epsilon)
    best, tried = 0, 0
    for points in candidate_point_sets(model, sample_budget, cfg):
        tried += 1
        best = max(best, minimal_cover_size(distance_matrix(model, Pseudometric.l2pn(points)), epsilon / 2.0))
        if best >= target:
            break

    result = inequality_result("extended haussler", target, best, tolerance('inequality'),
                               on_fail=CheckStatus.INCONCLUSIVE, epsilon=epsilon, point_sets=tried)
    if result.status is CheckStatus.INCONCLUSIVE:
        logger.warning("no witnessing point set among %d candidates at eps=%g", tried, epsilon)
    return result
