"""
Complexity package
"""

from src.complexity.luckiness import LuckinessFunction, LuckinessKind, block_masses

from src.complexity.shtarkov import (
    ComplexityReport,
    shtarkov_simple,
    shtarkov_luckiness,
    shtarkov_generalized,
    comp_max,
    maximum_likelihood,
    comp_luckiness,
    comp_generalized,
    comp_full,
    sample_complexities,
    log_integrand,
)

from src.complexity.nml import NmlDensity, nml_density, nml_regret, spread

from src.complexity.decomposition import (
    partition_bound_check,
    composite_decomposition_check,
    block_conditional,
    exact_block_bounds,
    best_block,
    two_part_bound_check,
)

__all__ = [
    # Luckiness
    'LuckinessFunction', 'LuckinessKind', 'block_masses',
    # Shtarkov integrals
    'ComplexityReport', 'shtarkov_simple', 'shtarkov_luckiness', 'shtarkov_generalized',
    'comp_max', 'maximum_likelihood', 'comp_luckiness', 'comp_generalized', 'comp_full',
    'sample_complexities', 'log_integrand',
    # NML
    'NmlDensity', 'nml_density', 'nml_regret', 'spread',
    # Decompositions
    'partition_bound_check', 'composite_decomposition_check', 'block_conditional',
    'exact_block_bounds', 'best_block', 'two_part_bound_check',
]
