"""
Harness package
"""

from src.harness.generators import GeneratorFamily, GeneratorSpec, generate, generate_document

from src.harness.rates import (
    RateEstimator,
    RateReport,
    mean_excess_risk,
    target_beta,
    finite_class_bound,
    fit_slope,
    rate_experiment,
)

from src.harness.experiments import (
    EqualizerReport,
    SelectionPoint,
    ModelSelectReport,
    equalizer_experiment,
    model_select_experiment,
)

from src.harness.reports import ResultCollector, result_rows, write_json, write_csv, write_report

__all__ = [
    # Generators
    'GeneratorFamily', 'GeneratorSpec', 'generate', 'generate_document',
    # Rates
    'RateEstimator', 'RateReport', 'mean_excess_risk', 'target_beta', 'finite_class_bound',
    'fit_slope', 'rate_experiment',
    # Experiments
    'EqualizerReport', 'SelectionPoint', 'ModelSelectReport', 'equalizer_experiment',
    'model_select_experiment',
    # Reports
    'ResultCollector', 'result_rows', 'write_json', 'write_csv', 'write_report',
]
