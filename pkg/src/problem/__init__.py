"""
Problem package
"""

from src.problem.types import (
    OutcomeSpace,
    FiniteDistribution,
    PredictorClass,
    LearningProblem,
    Parameterization,
    LossKind,
)

from src.problem.risk import (
    risk,
    risks,
    excess_risks,
    excess_loss,
    excess_loss_table,
    outcome_counts,
    cumulative_losses,
    sample_excess_losses,
)

from src.problem.partition import Partition, load_partition

from src.problem.builder import (
    build_problem,
    load_problem,
    problem_to_spec,
)

__all__ = [
    # Types
    'OutcomeSpace', 'FiniteDistribution', 'PredictorClass', 'LearningProblem',
    'Parameterization', 'LossKind',
    # Risk
    'risk', 'risks', 'excess_risks', 'excess_loss', 'excess_loss_table',
    'outcome_counts', 'cumulative_losses', 'sample_excess_losses',
    # Partitions
    'Partition', 'load_partition',
    # Building
    'build_problem', 'load_problem', 'problem_to_spec',
]
