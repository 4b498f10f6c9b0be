"""
Problem Types
Finite outcome spaces, distributions, predictor classes and learning problems
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from src.core.constants import LOGLOSS_TOL, LOSS_GAP_BOUND, MASS_TOL
from src.core.errors import AssumptionViolated, IndexOutOfRange, MalformedSpec

logger = logging.getLogger(__name__)

# Float slack when comparing loss gaps against the A1/A2 bounds
_ASSUMPTION_SLACK = 1e-12


class Parameterization(Enum):
    """How predictors act on outcomes"""
    DIRECT = "direct"
    SUPERVISED = "supervised"


class LossKind(Enum):
    GENERIC = "generic"
    LOG = "log"


def _frozen_array(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


def _log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore'):
        return np.log(values)


@dataclass(frozen=True, eq=False)
class OutcomeSpace:
    """Ordered outcome labels with a base measure and an optional (x, y) split"""
    outcomes: Tuple[str, ...]
    nu_weights: np.ndarray = None
    structure: Optional[Tuple[Tuple[Any, Any], ...]] = None

    def __post_init__(self):
        outcomes = tuple(str(o) for o in self.outcomes)
        if not outcomes:
            raise MalformedSpec("outcome space needs at least one outcome")
        if len(set(outcomes)) != len(outcomes):
            raise MalformedSpec("outcome labels must be unique")
        nu = np.ones(len(outcomes)) if self.nu_weights is None else np.asarray(self.nu_weights, dtype=float)
        if nu.shape != (len(outcomes),):
            raise MalformedSpec(f"expected {len(outcomes)} nu weights, got shape {nu.shape}")
        if not np.all(np.isfinite(nu)) or np.any(nu <= 0):
            raise MalformedSpec("nu weights must be finite and strictly positive")
        if self.structure is not None and len(self.structure) != len(outcomes):
            raise MalformedSpec("structure must give an (x, y) pair per outcome")
        object.__setattr__(self, 'outcomes', outcomes)
        object.__setattr__(self, 'nu_weights', _frozen_array(nu))
        if self.structure is not None:
            object.__setattr__(self, 'structure', tuple(tuple(s) for s in self.structure))

    @property
    def size(self) -> int:
        return len(self.outcomes)

    @property
    def log_nu(self) -> np.ndarray:
        return np.log(self.nu_weights)


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability masses over outcome indices"""
    masses: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        if masses.ndim != 1 or masses.size == 0:
            raise MalformedSpec("masses must be a nonempty vector")
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise MalformedSpec("masses must be finite and nonnegative")
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise MalformedSpec(f"masses sum to {masses.sum():.15g}, not 1")
        object.__setattr__(self, 'masses', _frozen_array(masses))

    @property
    def size(self) -> int:
        return self.masses.size

    @property
    def log_masses(self) -> np.ndarray:
        return _log(self.masses)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.masses > 0)

    def density(self, space: OutcomeSpace) -> np.ndarray:
        """Density w.r.t. the base measure: mass(z) / nu(z)"""
        return self.masses / space.nu_weights

    @classmethod
    def normalized(cls, weights: Sequence[float]) -> 'FiniteDistribution':
        weights = np.asarray(weights, dtype=float)
        return cls(weights / weights.sum())


@dataclass(frozen=True, eq=False)
class PredictorClass:
    """
    Finite predictor class.

    loss_table[f, z] is the loss of predictor f on outcome z. Supervised
    classes also carry feature_table[f, z] = f(x) for the x-part of z.
    """
    loss_table: np.ndarray
    parameterization: Parameterization = Parameterization.DIRECT
    feature_table: Optional[np.ndarray] = None
    lipschitz_L: float = 1.0
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        losses = np.asarray(self.loss_table, dtype=float)
        if losses.ndim != 2 or losses.shape[0] == 0:
            raise MalformedSpec("loss table must be a nonempty predictors x outcomes matrix")
        if not np.all(np.isfinite(losses)):
            raise MalformedSpec("losses must be finite reals")
        object.__setattr__(self, 'loss_table', _frozen_array(losses))

        if self.parameterization is Parameterization.SUPERVISED:
            if self.feature_table is None:
                raise MalformedSpec("supervised class needs a feature table")
            features = np.asarray(self.feature_table, dtype=float)
            if features.shape != losses.shape or not np.all(np.isfinite(features)):
                raise MalformedSpec("feature table must be finite and match the loss table")
            if not self.lipschitz_L > 0:
                raise MalformedSpec("lipschitz constant must be positive")
            object.__setattr__(self, 'feature_table', _frozen_array(features))
        else:
            object.__setattr__(self, 'feature_table', None)
            object.__setattr__(self, 'lipschitz_L', 1.0)

        if self.names is not None:
            if len(self.names) != losses.shape[0]:
                raise MalformedSpec("one name per predictor")
            object.__setattr__(self, 'names', tuple(self.names))

        if self.parameterization is Parameterization.SUPERVISED:
            self.check_lipschitz()

    @property
    def size(self) -> int:
        return self.loss_table.shape[0]

    @property
    def predictor_values(self) -> np.ndarray:
        """f(x) per outcome for supervised classes, the loss row itself for direct ones"""
        if self.parameterization is Parameterization.SUPERVISED:
            return self.feature_table
        return self.loss_table

    def check_lipschitz(self):
        """
        Verify A2: |l_f(z) - l_g(z)| <= L |f(x) - g(x)| for every pair and outcome.

        Per outcome the losses as a function of f(x) are checked on
        consecutive sorted feature values, which covers all pairs by the
        triangle inequality.
        """
        order = np.argsort(self.feature_table, axis=0, kind='stable')
        feats = np.take_along_axis(self.feature_table, order, axis=0)
        losses = np.take_along_axis(self.loss_table, order, axis=0)
        excess = np.abs(np.diff(losses, axis=0)) - self.lipschitz_L * np.diff(feats, axis=0)
        if excess.size and excess.max() > _ASSUMPTION_SLACK:
            i, z = np.unravel_index(np.argmax(excess), excess.shape)
            pair = (int(order[i, z]), int(order[i + 1, z]))
            raise AssumptionViolated("A2", pair=pair, outcome=int(z),
                                     detail=f"loss gap exceeds L*|f(x)-g(x)| by {excess[i, z]:.3g}")

    def check_index(self, f: int) -> int:
        if not 0 <= int(f) < self.size:
            raise IndexOutOfRange(f"predictor {f} outside 0..{self.size - 1}")
        return int(f)


@dataclass(frozen=True, eq=False)
class LearningProblem:
    """
    A finite learning problem: outcomes, the true distribution, a predictor
    class, a learning rate eta and a sample size n. The risk minimizer is
    computed on construction (ties to the lowest index) and A1 is enforced.
    """
    space: OutcomeSpace
    p_true: FiniteDistribution
    predictors: PredictorClass
    eta: float
    n: int
    loss_kind: LossKind = LossKind.GENERIC
    fstar_index: int = field(init=False)

    def __post_init__(self):
        k = self.space.size
        if self.p_true.size != k:
            raise MalformedSpec(f"distribution has {self.p_true.size} masses for {k} outcomes")
        if self.predictors.loss_table.shape[1] != k:
            raise MalformedSpec(f"loss table has {self.predictors.loss_table.shape[1]} columns for {k} outcomes")
        if not (np.isfinite(self.eta) and self.eta > 0):
            raise MalformedSpec("eta must be a positive real")
        if int(self.n) != self.n or self.n < 1:
            raise MalformedSpec("n must be a positive integer")
        if (self.predictors.parameterization is Parameterization.SUPERVISED
                and self.space.structure is None):
            logger.debug("supervised class without an explicit (x, y) structure")
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'eta', float(self.eta))

        risks = self.predictors.loss_table @ self.p_true.masses
        object.__setattr__(self, 'fstar_index', int(np.argmin(risks)))

        self._check_boundedness()
        if self.loss_kind is LossKind.LOG:
            self._check_log_loss()

    def _check_boundedness(self):
        losses = self.predictors.loss_table
        gaps = losses.max(axis=0) - losses.min(axis=0)
        z = int(np.argmax(gaps))
        if gaps[z] > LOSS_GAP_BOUND + _ASSUMPTION_SLACK:
            pair = (int(np.argmax(losses[:, z])), int(np.argmin(losses[:, z])))
            raise AssumptionViolated("A1", pair=pair, outcome=z,
                                     detail=f"loss gap {gaps[z]:.6g} > {LOSS_GAP_BOUND}")

    def _check_log_loss(self):
        # Rows must be nu-densities and the model must contain p
        total = np.exp(-self.predictors.loss_table) @ self.space.nu_weights
        bad = np.flatnonzero(np.abs(total - 1.0) > LOGLOSS_TOL)
        if bad.size:
            raise AssumptionViolated("LOGLOSS", outcome=None,
                                     detail=f"predictor {int(bad[0])} integrates to {total[bad[0]]:.12g}")
        support = self.p_true.support
        target = -np.log(self.p_true.density(self.space)[support])
        if np.max(np.abs(self.predictors.loss_table[self.fstar_index, support] - target)) > LOGLOSS_TOL:
            raise AssumptionViolated("LOGLOSS", detail="model is misspecified: p is not in the class")

    @property
    def n_outcomes(self) -> int:
        return self.space.size

    @property
    def n_predictors(self) -> int:
        return self.predictors.size

    @property
    def loss_table(self) -> np.ndarray:
        return self.predictors.loss_table

    @property
    def is_log_loss(self) -> bool:
        return self.loss_kind is LossKind.LOG

    @property
    def is_supervised(self) -> bool:
        return self.predictors.parameterization is Parameterization.SUPERVISED

    @property
    def lipschitz_L(self) -> float:
        return self.predictors.lipschitz_L

    def with_sample_size(self, n: int) -> 'LearningProblem':
        return dataclasses.replace(self, n=n)

    def with_eta(self, eta: float) -> 'LearningProblem':
        return dataclasses.replace(self, eta=eta)
