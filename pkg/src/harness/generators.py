"""
Problem Generators
Seeded synthetic learning problems, emitted as problem documents and built
through the regular problem builder
"""

import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.core.constants import LOSS_GAP_BOUND
from src.core.errors import MalformedSpec
from src.problem.builder import build_problem
from src.problem.partition import Partition
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)

# Tilt range for log-loss families; keeps every loss gap within 1/2
_MAX_TILT = 0.1


class GeneratorFamily(Enum):
    RANDOM_FINITE = "random_finite"
    THRESHOLD_GRID = "threshold_grid"
    NESTED_BLOCKS = "nested_blocks"
    RANDOM_SUPERVISED = "random_supervised"
    LOG_LOSS = "log_loss"


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Parameters of a synthetic problem.

    m is the number of outcomes (grid points for threshold_grid and
    random_supervised, whose outcomes are (x, y) pairs). noise is the
    threshold-grid margin h: P(Y != f*(X) | X) = (1 - h)/2.
    """
    family: GeneratorFamily
    m: int = 4
    n_predictors: int = 4
    block_sizes: Tuple[int, ...] = (1, 3)
    noise: float = 0.0
    n: int = 2
    eta: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.family, GeneratorFamily):
            try:
                object.__setattr__(self, 'family', GeneratorFamily(self.family))
            except ValueError as e:
                raise MalformedSpec(str(e)) from e
        object.__setattr__(self, 'block_sizes', tuple(int(b) for b in self.block_sizes))
        if self.m < 1 or self.n < 1 or self.n_predictors < 1:
            raise MalformedSpec("m, n and n_predictors must be positive")
        if not 0.0 <= self.noise <= 1.0:
            raise MalformedSpec(f"noise must lie in [0, 1], got {self.noise}")
        if self.family is GeneratorFamily.NESTED_BLOCKS and (
                not self.block_sizes or min(self.block_sizes) < 1):
            raise MalformedSpec("nested blocks need positive block sizes")
        if self.eta is not None and not self.eta > 0:
            raise MalformedSpec("eta must be positive")

    @property
    def learning_rate(self) -> float:
        if self.eta is not None:
            return float(self.eta)
        return 1.0 if self.family is GeneratorFamily.LOG_LOSS else 0.5

    def at(self, **changes) -> 'GeneratorSpec':
        return dataclasses.replace(self, **changes)

    def partition(self) -> Partition:
        """Consecutive blocks of a nested_blocks problem"""
        if self.family is not GeneratorFamily.NESTED_BLOCKS:
            raise MalformedSpec(f"{self.family.value} problems carry no partition")
        return Partition.consecutive(self.block_sizes)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GeneratorSpec':
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown or 'family' not in data:
            raise MalformedSpec(f"bad generator spec keys: {sorted(unknown) or 'family missing'}")
        return cls(**data)


def _threshold_grid(spec: GeneratorSpec, rng: np.random.Generator) -> Dict[str, Any]:
    m, h = spec.m, spec.noise
    best = m // 2
    xs = (np.arange(m) + 0.5) / m
    outcomes, structure, p = [], [], []
    for i in range(m):
        p_one = (1.0 + h) / 2.0 if i >= best else (1.0 - h) / 2.0
        for y in (0, 1):
            outcomes.append(f"x{i}y{y}")
            structure.append([float(xs[i]), y])
            p.append((p_one if y else 1.0 - p_one) / m)

    labels = np.array([y for _, y in structure], dtype=float)
    cells = np.repeat(np.arange(m), 2)
    predictors = []
    for j in range(m + 1):
        features = (cells >= j).astype(float)
        predictors.append({
            'name': f"t{j}",
            'features': features.tolist(),
            'losses': (LOSS_GAP_BOUND * np.abs(labels - features)).tolist(),
        })
    return {'outcomes': outcomes, 'p': p, 'predictors': predictors, 'structure': structure,
            'parameterization': 'supervised', 'lipschitz': LOSS_GAP_BOUND}


def _random_losses(spec: GeneratorSpec, rng: np.random.Generator, size: int) -> Dict[str, Any]:
    p = rng.dirichlet(np.ones(spec.m))
    losses = rng.uniform(0.0, LOSS_GAP_BOUND, size=(size, spec.m))
    return {'outcomes': [f"z{i}" for i in range(spec.m)], 'p': p.tolist(), 'losses': losses}


def _random_finite(spec: GeneratorSpec, rng: np.random.Generator) -> Dict[str, Any]:
    doc = _random_losses(spec, rng, spec.n_predictors)
    doc['predictors'] = [{'name': f"f{i}", 'losses': row.tolist()} for i, row in enumerate(doc.pop('losses'))]
    return doc


def _nested_blocks(spec: GeneratorSpec, rng: np.random.Generator) -> Dict[str, Any]:
    doc = _random_losses(spec, rng, sum(spec.block_sizes))
    losses = doc.pop('losses')
    # put a risk minimizer in the first block
    best = int(np.argmin(losses @ np.asarray(doc['p'])))
    losses[[0, best]] = losses[[best, 0]]
    doc['predictors'] = [{'name': f"f{i}", 'losses': row.tolist()} for i, row in enumerate(losses)]
    return doc


def _random_supervised(spec: GeneratorSpec, rng: np.random.Generator) -> Dict[str, Any]:
    m = spec.m
    xs = (np.arange(m) + 0.5) / m
    ys = (0.0, LOSS_GAP_BOUND)
    structure = [[float(x), y] for x in xs for y in ys]
    p = rng.dirichlet(np.ones(2 * m))
    labels = np.array([y for _, y in structure])
    predictors = []
    for i in range(spec.n_predictors):
        features = np.repeat(rng.uniform(0.0, LOSS_GAP_BOUND, size=m), 2)
        predictors.append({'name': f"f{i}", 'features': features.tolist(),
                           'losses': np.abs(labels - features).tolist()})
    return {'outcomes': [f"x{i}y{j}" for i in range(m) for j in range(2)], 'p': p.tolist(),
            'predictors': predictors, 'structure': structure, 'parameterization': 'supervised',
            'lipschitz': 1.0}


def _log_loss(spec: GeneratorSpec, rng: np.random.Generator) -> Dict[str, Any]:
    p = rng.dirichlet(np.ones(spec.m))
    direction = rng.uniform(0.0, 1.0, size=spec.m)
    tilts = np.concatenate([[0.0], rng.uniform(-_MAX_TILT, _MAX_TILT, size=spec.n_predictors - 1)])
    predictors = []
    for i, tilt in enumerate(tilts):
        tilted = p * np.exp(tilt * direction)
        tilted /= tilted.sum()
        predictors.append({'name': f"p{i}", 'losses': (-np.log(tilted)).tolist()})
    return {'outcomes': [f"z{i}" for i in range(spec.m)], 'p': p.tolist(),
            'predictors': predictors, 'loss': 'log'}


_FAMILIES = {
    GeneratorFamily.RANDOM_FINITE: _random_finite,
    GeneratorFamily.THRESHOLD_GRID: _threshold_grid,
    GeneratorFamily.NESTED_BLOCKS: _nested_blocks,
    GeneratorFamily.RANDOM_SUPERVISED: _random_supervised,
    GeneratorFamily.LOG_LOSS: _log_loss,
}


def generate_document(spec: GeneratorSpec) -> Dict[str, Any]:
    """The problem document for a spec; identical for identical specs"""
    rng = np.random.default_rng(spec.seed)
    doc = _FAMILIES[spec.family](spec, rng)
    doc['eta'] = spec.learning_rate
    doc['n'] = spec.n
    return doc


def generate(spec: GeneratorSpec) -> LearningProblem:
    problem = build_problem(generate_document(spec))
    logger.debug("generated %s problem: %d outcomes, %d predictors, n=%d", spec.family.value,
                 problem.n_outcomes, problem.n_predictors, problem.n)
    return problem
