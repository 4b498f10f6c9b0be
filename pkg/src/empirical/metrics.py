"""
Pseudometrics
L2 and L1 pseudodistances between predictors (or their losses) under P, an
empirical measure, or an entropified distribution Q_f0
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from src.core.errors import PreconditionFailed
from src.entropify.model import EntropifiedModel
from src.problem.risk import check_sample


class PseudometricKind(Enum):
    """Measure and order of a pseudometric"""
    L2P = "l2-p"
    L2PN = "l2-pn"
    L2Q = "l2-q"
    L1Q = "l1-q"


class Over(Enum):
    """Which functions are compared"""
    PREDICTORS = "predictors"       # f(x) for supervised classes, l_f for direct ones
    LOSS_CLASS = "loss-class"       # l_f0 - l_f


@dataclass(frozen=True)
class Pseudometric:
    """
    A pseudometric over a finite class. L2Q and L1Q need f0, L2PN a sample,
    and the loss class is always centered at f0.
    """
    kind: PseudometricKind
    over: Over = Over.PREDICTORS
    f0: Optional[int] = None
    sample: Optional[Sequence[int]] = None

    def __post_init__(self):
        if self.kind in (PseudometricKind.L2Q, PseudometricKind.L1Q) and self.f0 is None:
            raise PreconditionFailed(f"{self.kind.value} needs a reference predictor f0")
        if self.over is Over.LOSS_CLASS and self.f0 is None:
            raise PreconditionFailed("the loss class is centered at f0, none given")
        if self.kind is PseudometricKind.L2PN:
            if self.sample is None or len(self.sample) == 0:
                raise PreconditionFailed("the empirical pseudometric needs a nonempty sample")
            object.__setattr__(self, 'sample', tuple(int(z) for z in self.sample))

    @property
    def order(self) -> int:
        return 1 if self.kind is PseudometricKind.L1Q else 2

    @classmethod
    def l2p(cls) -> 'Pseudometric':
        return cls(PseudometricKind.L2P)

    @classmethod
    def l2pn(cls, sample: Sequence[int]) -> 'Pseudometric':
        return cls(PseudometricKind.L2PN, sample=sample)

    @classmethod
    def l2q(cls, f0: int, over: Over = Over.LOSS_CLASS) -> 'Pseudometric':
        return cls(PseudometricKind.L2Q, over=over, f0=f0)

    def weights(self, model: EntropifiedModel) -> np.ndarray:
        """Per-outcome masses of the underlying measure"""
        problem = model.problem
        if self.kind is PseudometricKind.L2P:
            return problem.p_true.masses
        if self.kind is PseudometricKind.L2PN:
            sample = check_sample(problem, self.sample)
            return np.bincount(sample, minlength=problem.n_outcomes) / sample.size
        return model.q_masses(self.f0)

    def values(self, model: EntropifiedModel) -> np.ndarray:
        """(|F|, |Z|) table of the compared functions"""
        problem = model.problem
        if self.over is Over.LOSS_CLASS:
            problem.predictors.check_index(self.f0)
            return problem.loss_table[self.f0][None, :] - problem.loss_table
        return problem.predictors.predictor_values


def distance_matrix(model: EntropifiedModel, metric: Pseudometric,
                    members: Optional[Sequence[int]] = None) -> np.ndarray:
    """Pairwise pseudodistances among members (default the whole class)"""
    values = metric.values(model)
    if members is not None:
        members = [model.problem.predictors.check_index(f) for f in members]
        values = values[members]
    weights = metric.weights(model)
    if metric.order == 1:
        return cdist(values * weights, values * weights, 'cityblock')
    root = np.sqrt(weights)
    return cdist(values * root, values * root, 'euclidean')


def pseudodistance(model: EntropifiedModel, metric: Pseudometric, a: int, b: int) -> float:
    return float(distance_matrix(model, metric, [a, b])[0, 1])


def diameter(model: EntropifiedModel, metric: Pseudometric, members: Optional[Sequence[int]] = None) -> float:
    distances = distance_matrix(model, metric, members)
    return float(distances.max()) if distances.size else 0.0
