"""
Monte Carlo Expectations
Seeded i.i.d. sampling from product measures with exact-first routing
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.core.config import get_config
from src.core.errors import EnumerationCapExceeded, PreconditionFailed
from src.core.events import EventType, publish
from src.measure.enumerator import (
    MeasureLike,
    SampleFunction,
    as_measure,
    exact_expectation,
    exact_log_expectation,
)

logger = logging.getLogger(__name__)


class Method(Enum):
    """How an expectation was computed"""
    EXACT = "exact"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class McConfig:
    """(seed, stream_id) fully determine the draws; trials is the sample count"""
    trials: int
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise PreconditionFailed("McConfig needs trials >= 1")

    def generator(self) -> np.random.Generator:
        # Philox is counter-based; spawn_key keeps streams independent
        sequence = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.Philox(sequence))

    def stream(self, stream_id: int) -> 'McConfig':
        return McConfig(self.trials, self.seed, stream_id)

    @classmethod
    def from_config(cls, stream_id: int = 0) -> 'McConfig':
        config = get_config()
        return cls(trials=int(config.get('settings', 'engine.mc_trials')),
                   seed=int(config.get('settings', 'engine.seed')),
                   stream_id=stream_id)


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    method: Method


@dataclass(frozen=True)
class LogEstimate:
    """log of a positive expectation; rel_std_error is std_error / estimate"""
    log_value: float
    rel_std_error: float
    method: Method


def draw_samples(source: MeasureLike, cfg: McConfig, trials: Optional[int] = None) -> np.ndarray:
    """(trials, n) i.i.d. samples from the product measure"""
    measure = as_measure(source)
    masses = measure.masses
    total = masses.sum()
    if abs(total - 1.0) > 1e-9:
        raise PreconditionFailed(f"cannot sample from a measure of total mass {total:.6g}")
    rng = cfg.generator()
    count = cfg.trials if trials is None else trials
    return rng.choice(measure.n_outcomes, size=(count, measure.n), p=masses / total)


def mc_expectation(source: MeasureLike, g: SampleFunction, cfg: McConfig) -> Tuple[float, float]:
    """
    Monte Carlo expectation of a sample function

    Returns:
        (sample mean, standard error); bitwise reproducible given cfg
    """
    if cfg.trials < 2:
        raise PreconditionFailed("Monte Carlo needs at least 2 trials")
    values = np.asarray(g(draw_samples(source, cfg)), dtype=float)
    return float(values.mean()), _std_error(values)


def _std_error(values: np.ndarray) -> float:
    """Sample standard error; exactly 0 when every draw agrees"""
    if np.all(values == values[0]):
        return 0.0
    return math.sqrt(max(float(values.var(ddof=1)), 0.0) / values.size)


def mc_log_expectation(source: MeasureLike, log_g: SampleFunction, cfg: McConfig) -> Tuple[float, float]:
    """Monte Carlo log E[exp(log_g)] with the relative standard error of E[exp(log_g)]"""
    if cfg.trials < 2:
        raise PreconditionFailed("Monte Carlo needs at least 2 trials")
    logs = np.asarray(log_g(draw_samples(source, cfg)), dtype=float)
    if np.all(logs == -np.inf):
        return -math.inf, 0.0
    shift = logs.max()
    scaled = np.exp(logs - shift)
    mean = scaled.mean()
    return float(shift + np.log(mean)), _std_error(scaled) / float(mean)


def expectation(source: MeasureLike, g: SampleFunction, cfg: Optional[McConfig] = None,
                cap: Optional[int] = None) -> Estimate:
    """Exact expectation when enumerable, Monte Carlo otherwise"""
    try:
        return Estimate(exact_expectation(source, g, cap=cap), 0.0, Method.EXACT)
    except EnumerationCapExceeded as e:
        cfg = cfg or McConfig.from_config()
        _fallback(e, cfg)
        value, se = mc_expectation(source, g, cfg)
        return Estimate(value, se, Method.MONTE_CARLO)


def log_expectation(source: MeasureLike, log_g: SampleFunction, cfg: Optional[McConfig] = None,
                    cap: Optional[int] = None) -> LogEstimate:
    """Exact log E[exp(log_g)] when enumerable, Monte Carlo otherwise"""
    try:
        return LogEstimate(exact_log_expectation(source, log_g, cap=cap), 0.0, Method.EXACT)
    except EnumerationCapExceeded as e:
        cfg = cfg or McConfig.from_config()
        _fallback(e, cfg)
        log_value, rel_se = mc_log_expectation(source, log_g, cfg)
        return LogEstimate(log_value, rel_se, Method.MONTE_CARLO)


def _fallback(error: EnumerationCapExceeded, cfg: McConfig):
    logger.info("%s; switching to Monte Carlo with %d trials", error, cfg.trials)
    publish(EventType.MC_FALLBACK, states=error.states, cap=error.cap, trials=cfg.trials)


