"""
Entropification package
"""

from src.entropify.model import EntropifiedModel, entropify
from src.entropify.annealed import annealed_expectation

__all__ = ['EntropifiedModel', 'entropify', 'annealed_expectation']
