"""
Empirical complexity package
"""

from src.empirical.metrics import (
    PseudometricKind,
    Over,
    Pseudometric,
    pseudodistance,
    distance_matrix,
    diameter,
)

from src.empirical.covering import (
    CoverResult,
    covering_number,
    cover_from_distances,
    minimal_cover_size,
)

from src.empirical.rademacher import empirical_rademacher, rademacher, batch_rademacher
from src.empirical.local import loss_class, t_n_value, t_n_values, h_local, t_n_log_moment

from src.empirical.chain import (
    verify_opper_haussler,
    verify_talagrand_moment,
    verify_symmetrization,
    verify_lemma_sigma,
    lemma_sigma_factor,
    verify_oht,
)

from src.empirical.haussler import extended_haussler_check

__all__ = [
    # Metrics
    'PseudometricKind', 'Over', 'Pseudometric', 'pseudodistance', 'distance_matrix', 'diameter',
    # Covering
    'CoverResult', 'covering_number', 'cover_from_distances', 'minimal_cover_size',
    # Rademacher / H-local
    'empirical_rademacher', 'rademacher', 'batch_rademacher',
    'loss_class', 't_n_value', 't_n_values', 'h_local', 't_n_log_moment',
    # Chain
    'verify_opper_haussler', 'verify_talagrand_moment', 'verify_symmetrization',
    'verify_lemma_sigma', 'lemma_sigma_factor', 'verify_oht',
    # Haussler
    'extended_haussler_check',
]
