"""
Rademacher Complexities
Empirical Rademacher complexity of a finite function table on a sample,
and its expectation over samples from P or from an entropified Q_f0
"""

import functools
import logging
from typing import Optional, Sequence

import numpy as np

from src.core.constants import EXACT_SIGNS_MAX
from src.core.errors import PreconditionFailed
from src.entropify.model import EntropifiedModel
from src.measure.enumerator import ProductMeasure
from src.measure.montecarlo import Estimate, McConfig, Method, expectation, mc_expectation

logger = logging.getLogger(__name__)

# Largest (samples x signs x functions) block evaluated at once
_BLOCK = 1 << 22


@functools.lru_cache(maxsize=EXACT_SIGNS_MAX + 1)
def sign_vectors(n: int) -> np.ndarray:
    """All 2^n sign vectors as a (2^n, n) array"""
    codes = np.arange(1 << n, dtype=np.int64)[:, None] >> np.arange(n, dtype=np.int64)[None, :]
    signs = (2 * (codes & 1) - 1).astype(float)
    signs.setflags(write=False)
    return signs


def _signs(n: int, cfg: Optional[McConfig]) -> np.ndarray:
    if n <= EXACT_SIGNS_MAX:
        return sign_vectors(n)
    cfg = cfg or McConfig.from_config()
    return cfg.stream(cfg.stream_id + 1).generator().choice([-1.0, 1.0], size=(cfg.trials, n))


def batch_rademacher(table: np.ndarray, samples: np.ndarray, cfg: Optional[McConfig] = None) -> np.ndarray:
    """
    E_eps[sup_h |(1/n) sum_i eps_i h(S_i)|] for every sample of a batch

    table is (|H|, |Z|); samples are (batch, n). Signs are enumerated for
    n <= EXACT_SIGNS_MAX and drawn once per call (shared by the batch) above.
    """
    table = np.atleast_2d(np.asarray(table, dtype=float))
    samples = np.atleast_2d(samples)
    n = samples.shape[1]
    if n == 0:
        raise PreconditionFailed("Rademacher complexity of an empty sample")
    signs = _signs(n, cfg)
    step = max(1, _BLOCK // (signs.shape[0] * table.shape[0]))
    out = np.empty(samples.shape[0])
    for start in range(0, samples.shape[0], step):
        values = table[:, samples[start:start + step]]                  # (H, m, n)
        sums = np.einsum('sn,hmn->msh', signs, values)
        out[start:start + step] = np.abs(sums).max(axis=2).mean(axis=1) / n
    return out


def empirical_rademacher(table: np.ndarray, sample: Sequence[int], cfg: Optional[McConfig] = None) -> Estimate:
    """Empirical Rademacher complexity of a function table on one sample"""
    sample = np.asarray(sample, dtype=np.int64)
    table = np.atleast_2d(np.asarray(table, dtype=float))
    if sample.size <= EXACT_SIGNS_MAX:
        return Estimate(float(batch_rademacher(table, sample[None, :])[0]), 0.0, Method.EXACT)

    cfg = cfg or McConfig.from_config()
    signs = _signs(sample.size, cfg)
    sups = np.abs(signs @ table[:, sample].T).max(axis=1) / sample.size
    return Estimate(float(sups.mean()), float(sups.std(ddof=1) / np.sqrt(sups.size)), Method.MONTE_CARLO)


def rademacher(model: EntropifiedModel, table: np.ndarray, n: Optional[int] = None,
               f0: Optional[int] = None, cfg: Optional[McConfig] = None, cap: Optional[int] = None,
               method: Optional[Method] = None) -> Estimate:
    """
    E_{S^n}[empirical Rademacher complexity] with S^n ~ P^n, or Q_f0^n when f0 is given

    Exact over samples when enumerable, Monte Carlo over samples otherwise
    (or always, with method=Method.MONTE_CARLO).
    """
    n = model.n if n is None else int(n)
    if f0 is None:
        source = ProductMeasure.of_problem(model.problem, n)
    else:
        source = model.entropified_measure(f0, n)

    def per_sample(samples):
        return batch_rademacher(table, samples, cfg)

    if method is Method.MONTE_CARLO:
        value, se = mc_expectation(source, per_sample, cfg or McConfig.from_config())
        return Estimate(value, se, Method.MONTE_CARLO)
    return expectation(source, per_sample, cfg=cfg, cap=cap)
