"""
Measure engine package
"""

from src.measure.logspace import (
    LogAccumulator,
    SignedLogAccumulator,
    log_add,
    log_sub,
    masked_expectation,
)

from src.measure.enumerator import (
    ProductMeasure,
    MeasureLike,
    SampleChunk,
    SampleEnumerator,
    as_measure,
    exact_expectation,
    exact_log_expectation,
)

from src.measure.montecarlo import (
    Method,
    McConfig,
    Estimate,
    LogEstimate,
    draw_samples,
    mc_expectation,
    mc_log_expectation,
    expectation,
    log_expectation,
)

__all__ = [
    # Log domain
    'LogAccumulator', 'SignedLogAccumulator', 'log_add', 'log_sub', 'masked_expectation',
    # Enumeration
    'ProductMeasure', 'MeasureLike', 'SampleChunk', 'SampleEnumerator', 'as_measure',
    'exact_expectation', 'exact_log_expectation',
    # Monte Carlo
    'Method', 'McConfig', 'Estimate', 'LogEstimate', 'draw_samples',
    'mc_expectation', 'mc_log_expectation', 'expectation', 'log_expectation',
]
