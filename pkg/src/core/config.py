"""
Configuration System
Run settings (enumeration cap, MC budget, tolerances, experiment grids) from JSON files
"""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from src.core import constants
from src.core.errors import MalformedSpec

logger = logging.getLogger(__name__)


def _default_settings() -> dict:
    return {
        'engine': {
            'exact_cap': constants.EXACT_CAP,
            'mc_trials': constants.DEFAULT_MC_TRIALS,
            'seed': constants.DEFAULT_SEED,
            'chunk_size': constants.CHUNK_SIZE,
        },
        'tolerance': {
            'identity': constants.IDENTITY_TOL,
            'inequality': constants.INEQUALITY_TOL,
            'normalization': constants.NORMALIZATION_TOL,
            'equalizer': constants.EQUALIZER_TOL,
            'mc_sigmas': constants.MC_SIGMAS,
        },
        'harness': {
            'slope_tolerance': constants.SLOPE_TOLERANCE,
            'n_list': list(constants.DEFAULT_N_LIST),
            'gamma_grid': list(constants.DEFAULT_GAMMA_GRID),
        },
    }


class Config:
    """
    Configuration manager
    Loads named JSON documents from a directory and serves dotted-key lookups.
    A missing document falls back to built-in defaults without touching disk.
    """

    def __init__(self, config_dir: str = "config"):
        self.config_dir = Path(config_dir)
        self._configs: Dict[str, dict] = {}

    def load(self, name: str, filename: str = None) -> dict:
        """
        Load a configuration file

        Args:
            name: Identifier for this config
            filename: JSON file to load (defaults to name.json)

        Returns:
            The loaded document, merged over the defaults for that name
        """
        if filename is None:
            filename = f"{name}.json"

        filepath = self.config_dir / filename
        data = self._create_default_config(name)

        try:
            with open(filepath, 'r') as f:
                _merge(data, json.load(f))
            logger.debug("loaded config '%s' from %s", name, filepath)
        except FileNotFoundError:
            logger.debug("config file %s not found, using defaults", filepath)
        except json.JSONDecodeError as e:
            logger.error("error parsing JSON in %s: %s; using defaults", filepath, e)

        if name == 'settings':
            check_settings(data)
        self._configs[name] = data
        return data

    def save(self, name: str, data: Optional[dict] = None, filename: str = None):
        """Write a configuration document (the loaded one when data is None)"""
        if filename is None:
            filename = f"{name}.json"
        if data is None:
            data = self.get(name, default={})

        self.config_dir.mkdir(parents=True, exist_ok=True)
        filepath = self.config_dir / filename
        with open(filepath, 'w') as f:
            json.dump(data, f, indent=4)
        self._configs[name] = data
        logger.debug("saved config '%s' to %s", name, filepath)

    def get(self, name: str, key: str = None, default: Any = None) -> Any:
        """
        Get a configuration value

        Args:
            name: Config identifier
            key: Dot-separated path to value (e.g., "engine.exact_cap")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        if name not in self._configs:
            self.load(name)

        if key is None:
            return self._configs[name]

        value = self._configs[name]
        for part in key.split('.'):
            if isinstance(value, dict) and part in value:
                value = value[part]
            else:
                return default

        return value

    def set(self, name: str, key: str, value: Any):
        """Set a configuration value in memory (does not auto-save)"""
        if name not in self._configs:
            self.load(name)

        config = self._configs[name]
        parts = key.split('.')
        for part in parts[:-1]:
            config = config.setdefault(part, {})
        config[parts[-1]] = value

    def reload(self, name: str):
        """Force reload a configuration file"""
        self._configs.pop(name, None)
        self.load(name)

    def _create_default_config(self, name: str) -> dict:
        defaults = {'settings': _default_settings()}
        return copy.deepcopy(defaults.get(name, {}))

    def get_all(self) -> Dict[str, dict]:
        return self._configs.copy()

    def clear(self):
        self._configs.clear()


def check_settings(data: dict):
    '''
    Raises:
        MalformedSpec: a cap, budget or tolerance is not a positive number,
            or a grid is empty
    '''
    engine, tol, harness = data['engine'], data['tolerance'], data['harness']
    for key in ('exact_cap', 'mc_trials', 'chunk_size'):
        if not isinstance(engine.get(key), int) or engine[key] < 1:
            raise MalformedSpec(f'engine.{key} must be a positive integer, got {engine.get(key)!r}')
    for key, value in tol.items():
        if not isinstance(value, (int, float)) or value <= 0:
            raise MalformedSpec(f'tolerance.{key} must be positive, got {value!r}')
    for key in ('n_list', 'gamma_grid'):
        if not harness.get(key):
            raise MalformedSpec(f'harness.{key} must be a nonempty list')


def _merge(base: dict, override: dict):
    # Nested dictionaries merge key by key; other values replace
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value


_global_config = None


def get_config() -> Config:
    """Get the global config instance (singleton pattern)"""
    global _global_config
    if _global_config is None:
        _global_config = Config()
        _global_config.load('settings')
    return _global_config


def set_config(config: Config):
    """Replace the global config (the CLI does this for --config-dir)"""
    global _global_config
    _global_config = config


def setting(key: str) -> Any:
    """Dotted lookup in the 'settings' document of the global config"""
    return get_config().get('settings', key)


def tolerance(name: str) -> float:
    """A named check tolerance: identity, inequality, normalization, equalizer or mc_sigmas"""
    return float(setting(f'tolerance.{name}'))
