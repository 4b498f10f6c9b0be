"""
Shared fixtures: small hand-built problems and seeded random families
"""

from pathlib import Path

import pytest

from src.core.config import set_config
from src.core.events import get_event_manager
from src.harness.generators import GeneratorFamily, GeneratorSpec, generate
from src.problem.builder import build_problem, load_problem

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(autouse=True)
def fresh_globals():
    """Every test starts from default settings and no listeners"""
    set_config(None)
    get_event_manager().clear_listeners()
    yield
    set_config(None)
    get_event_manager().clear_listeners()


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def make_problem():
    """Factory: make_problem(losses, p, eta=0.5, n=2, **extra)"""
    def factory(losses, p, eta=0.5, n=2, **extra):
        doc = {
            'outcomes': [f"z{i}" for i in range(len(p))],
            'p': list(p),
            'predictors': [{'losses': list(row)} for row in losses],
            'eta': eta,
            'n': n,
        }
        doc.update(extra)
        return build_problem(doc)
    return factory


@pytest.fixture
def small_problem():
    """Two outcomes, three predictors, eta = 1/2, n = 3"""
    return load_problem(DATA / "coin.json")


@pytest.fixture
def supervised_problem():
    return load_problem(DATA / "supervised.json")


@pytest.fixture
def log_loss_problem():
    return generate(GeneratorSpec(GeneratorFamily.LOG_LOSS, m=2, n_predictors=3, n=2, seed=3))


def _random_specs():
    specs = []
    for seed in range(12):
        specs.append(GeneratorSpec(
            GeneratorFamily.RANDOM_FINITE,
            m=2 + seed % 2,
            n_predictors=1 + seed % 5,
            n=1 + seed % 4,
            eta=(0.25, 0.5, 1.0)[seed % 3],
            seed=seed,
        ))
    return specs


@pytest.fixture
def random_problems():
    """Seeded random finite problems with |Z| in {2, 3}, n in 1..4, |F| in 1..5"""
    return [generate(spec) for spec in _random_specs()]
