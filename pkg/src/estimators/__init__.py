"""
Estimators package
"""

from src.estimators.base import (
    Estimator,
    DeterministicEstimator,
    RandomizedEstimator,
    EstimatorKind,
    PriorOverClass,
    PenaltyFunction,
    as_randomized,
    dirac,
)

from src.estimators.erm import erm, erm_within, penalized_erm

from src.estimators.bayes import (
    generalized_bayes,
    tempered_posterior,
    information_complexity,
    extended_stochastic_complexity,
    kl_divergence,
    InformationComplexity,
)

from src.estimators.mdl import TwoPartMdl, two_part_mdl

from src.estimators.selection import ValidationSplit, EtaSelection, eta_grid_select

__all__ = [
    # Types
    'Estimator', 'DeterministicEstimator', 'RandomizedEstimator', 'EstimatorKind',
    'PriorOverClass', 'PenaltyFunction', 'as_randomized', 'dirac',
    # ERM
    'erm', 'erm_within', 'penalized_erm',
    # Bayes
    'generalized_bayes', 'tempered_posterior', 'information_complexity',
    'extended_stochastic_complexity', 'kl_divergence', 'InformationComplexity',
    # MDL
    'TwoPartMdl', 'two_part_mdl',
    # Selection
    'ValidationSplit', 'EtaSelection', 'eta_grid_select',
]
