"""
Problem Builder
Parses JSON problem documents into validated LearningProblem objects
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from src.core.constants import LOSS_GAP_BOUND
from src.core.errors import MalformedSpec
from src.core.events import EventType, publish
from src.problem.types import (
    FiniteDistribution,
    LearningProblem,
    LossKind,
    OutcomeSpace,
    Parameterization,
    PredictorClass,
)

logger = logging.getLogger(__name__)

_REQUIRED = ('outcomes', 'p', 'predictors', 'eta', 'n')


def build_problem(spec: Dict[str, Any], allow_unscaled: bool = False) -> LearningProblem:
    """
    Build a learning problem from its JSON description

    Args:
        spec: {outcomes, p, nu?, predictors: [{losses, features?, name?}], eta, n,
               parameterization?, structure?, lipschitz?, loss?}
        allow_unscaled: rescale losses so that A1 holds instead of rejecting

    Returns:
        The validated problem with fstar_index computed

    Raises:
        MalformedSpec: missing or inconsistent fields
        AssumptionViolated: A1, A2 or log-loss validity fails
    """
    if not isinstance(spec, dict):
        raise MalformedSpec("problem spec must be a JSON object")
    missing = [key for key in _REQUIRED if key not in spec]
    if missing:
        raise MalformedSpec(f"problem spec missing fields: {', '.join(missing)}")

    try:
        parameterization = Parameterization(spec.get('parameterization', 'direct'))
        loss_kind = LossKind(spec.get('loss', 'generic'))
    except ValueError as e:
        raise MalformedSpec(str(e)) from e

    space = OutcomeSpace(
        outcomes=tuple(spec['outcomes']),
        nu_weights=spec.get('nu'),
        structure=spec.get('structure'),
    )
    p_true = FiniteDistribution(np.asarray(spec['p'], dtype=float))

    entries = spec['predictors']
    if not isinstance(entries, list) or not entries:
        raise MalformedSpec("predictors must be a nonempty list")
    try:
        losses = np.array([entry['losses'] for entry in entries], dtype=float)
        features = None
        if parameterization is Parameterization.SUPERVISED:
            features = np.array([entry['features'] for entry in entries], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedSpec(f"bad predictor entry: {e}") from e
    names = tuple(str(entry.get('name', f"f{i}")) for i, entry in enumerate(entries))
    lipschitz = float(spec.get('lipschitz', 1.0))

    if losses.ndim == 2 and losses.size:
        gap = float((losses.max(axis=0) - losses.min(axis=0)).max())
        if allow_unscaled and gap > LOSS_GAP_BOUND:
            factor = LOSS_GAP_BOUND / gap
            losses = losses * factor
            lipschitz *= factor
            logger.warning("losses rescaled by %.6g to enforce A1 (largest gap was %.6g)", factor, gap)
            publish(EventType.PROBLEM_RESCALED, factor=factor, gap=gap)

    predictors = PredictorClass(
        loss_table=losses,
        parameterization=parameterization,
        feature_table=features,
        lipschitz_L=lipschitz,
        names=names,
    )

    try:
        eta = float(spec['eta'])
        n = spec['n']
    except (TypeError, ValueError) as e:
        raise MalformedSpec(f"bad eta/n: {e}") from e
    if isinstance(n, bool) or not isinstance(n, (int, float)) or int(n) != n:
        raise MalformedSpec("n must be a positive integer")

    return LearningProblem(space=space, p_true=p_true, predictors=predictors,
                           eta=eta, n=int(n), loss_kind=loss_kind)


def load_problem(path: Union[str, Path], allow_unscaled: bool = False) -> LearningProblem:
    """Read and build a problem document from disk"""
    try:
        with open(path, 'r') as f:
            spec = json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedSpec(f"{path}: {e}") from e
    logger.info("loaded problem from %s", path)
    return build_problem(spec, allow_unscaled=allow_unscaled)


def problem_to_spec(problem: LearningProblem) -> Dict[str, Any]:
    """Inverse of build_problem (up to float formatting)"""
    classes = problem.predictors
    names = classes.names or tuple(f"f{i}" for i in range(classes.size))
    entries = []
    for i in range(classes.size):
        entry = {'name': names[i], 'losses': classes.loss_table[i].tolist()}
        if classes.feature_table is not None:
            entry['features'] = classes.feature_table[i].tolist()
        entries.append(entry)

    spec = {
        'outcomes': list(problem.space.outcomes),
        'p': problem.p_true.masses.tolist(),
        'nu': problem.space.nu_weights.tolist(),
        'predictors': entries,
        'eta': problem.eta,
        'n': problem.n,
        'parameterization': classes.parameterization.value,
        'loss': problem.loss_kind.value,
    }
    if problem.space.structure is not None:
        spec['structure'] = [list(s) for s in problem.space.structure]
    if problem.is_supervised:
        spec['lipschitz'] = classes.lipschitz_L
    return spec
