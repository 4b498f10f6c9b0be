"""
Covering Numbers
Greedy farthest-point covers with Voronoi cells, and exact minimal internal
covers for small classes
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.core.constants import EXACT_COVER_MAX
from src.core.errors import PreconditionFailed
from src.empirical.metrics import Pseudometric, distance_matrix
from src.entropify.model import EntropifiedModel
from src.problem.partition import Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CoverResult:
    """
    An epsilon-cover of the class by some of its own members.

    centers are predictor indices in ascending order; cells[f] is the
    position in centers of the center nearest to f (ties to the lowest).
    exact_size is the minimal internal cover size when it was searched.
    """
    epsilon: float
    centers: Tuple[int, ...]
    cells: np.ndarray
    radius: float
    exact_size: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.centers)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.cells == k)

    def as_partition(self) -> Partition:
        return Partition.from_assignment(self.cells.tolist())


def greedy_centers(distances: np.ndarray, epsilon: float) -> List[int]:
    """
    Farthest-point traversal from predictor 0, stopped once every point is
    within epsilon of a center. The traversal order does not depend on
    epsilon, so the cover size is nonincreasing in it.
    """
    centers = [0]
    nearest = distances[0].copy()
    while nearest.max() > epsilon:
        far = int(np.argmax(nearest))
        centers.append(far)
        nearest = np.minimum(nearest, distances[far])
    return sorted(centers)


def voronoi_cells(distances: np.ndarray, centers: List[int]) -> np.ndarray:
    return np.argmin(distances[:, centers], axis=1)


def minimal_cover_size(distances: np.ndarray, epsilon: float) -> int:
    """Smallest number of members whose epsilon-balls cover the class (exhaustive)"""
    size = distances.shape[0]
    if size > EXACT_COVER_MAX:
        raise PreconditionFailed(f"exact covering limited to {EXACT_COVER_MAX} predictors, got {size}")
    within = distances <= epsilon
    for k in range(1, size + 1):
        for subset in itertools.combinations(range(size), k):
            if within[list(subset)].any(axis=0).all():
                return k
    return size


def cover_from_distances(distances: np.ndarray, epsilon: float, exact: Optional[bool] = None) -> CoverResult:
    if not epsilon > 0:
        raise PreconditionFailed("covering radius must be positive")
    centers = greedy_centers(distances, epsilon)
    cells = voronoi_cells(distances, centers)
    radius = float(distances[np.arange(distances.shape[0]), np.asarray(centers)[cells]].max())
    if exact is None:
        exact = distances.shape[0] <= EXACT_COVER_MAX
    exact_size = minimal_cover_size(distances, epsilon) if exact else None
    return CoverResult(float(epsilon), tuple(centers), cells, radius, exact_size)


def covering_number(model: EntropifiedModel, metric: Pseudometric, epsilon: float,
                    exact: Optional[bool] = None) -> CoverResult:
    """
    Greedy internal epsilon-cover of the whole class in the given pseudometric

    Its size upper-bounds the minimal cover; the exhaustive minimum is added
    for classes of at most EXACT_COVER_MAX predictors (or when exact=True).
    """
    result = cover_from_distances(distance_matrix(model, metric), epsilon, exact)
    logger.debug("%s cover at eps=%g: greedy %d, exact %s", metric.kind.value, epsilon,
                 result.size, result.exact_size)
    return result
