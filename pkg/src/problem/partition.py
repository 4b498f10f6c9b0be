"""
Partitions of a predictor class into blocks
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from src.core.errors import BadPartition, MalformedSpec


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint blocks of predictor indices covering the whole class"""
    blocks: Tuple[Tuple[int, ...], ...]
    n_predictors: int

    def __post_init__(self):
        blocks = tuple(tuple(int(f) for f in block) for block in self.blocks)
        if not blocks or any(len(block) == 0 for block in blocks):
            raise BadPartition("partition needs nonempty blocks")
        flat = [f for block in blocks for f in block]
        if sorted(flat) != list(range(self.n_predictors)):
            raise BadPartition(f"blocks must cover predictors 0..{self.n_predictors - 1} exactly once")
        object.__setattr__(self, 'blocks', blocks)

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def block_of(self) -> np.ndarray:
        """Block index of every predictor"""
        owner = np.empty(self.n_predictors, dtype=np.int64)
        for k, block in enumerate(self.blocks):
            owner[list(block)] = k
        return owner

    def indices(self, k: int) -> np.ndarray:
        return np.asarray(self.blocks[k], dtype=np.int64)

    @classmethod
    def single_block(cls, n_predictors: int) -> 'Partition':
        return cls((tuple(range(n_predictors)),), n_predictors)

    @classmethod
    def singletons(cls, n_predictors: int) -> 'Partition':
        return cls(tuple((f,) for f in range(n_predictors)), n_predictors)

    @classmethod
    def from_assignment(cls, assignment: Sequence[int]) -> 'Partition':
        """Blocks from a per-predictor block label (labels sorted ascending)"""
        assignment = list(assignment)
        labels = sorted(set(assignment))
        blocks = tuple(tuple(f for f, a in enumerate(assignment) if a == label) for label in labels)
        return cls(blocks, len(assignment))

    @classmethod
    def consecutive(cls, sizes: Sequence[int]) -> 'Partition':
        bounds = np.cumsum([0] + list(sizes))
        blocks = tuple(tuple(range(bounds[k], bounds[k + 1])) for k in range(len(sizes)))
        return cls(blocks, int(bounds[-1]))


def load_partition(path: Union[str, Path], n_predictors: int) -> Partition:
    """Read {"blocks": [[...], ...]} from a JSON file"""
    try:
        with open(path, 'r') as f:
            data = json.load(f)
        return Partition(tuple(tuple(b) for b in data['blocks']), n_predictors)
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise MalformedSpec(f"{path}: {e}") from e
