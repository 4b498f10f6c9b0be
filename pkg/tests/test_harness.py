"""
Tests for problem generators, rate experiments, experiments and reports
"""

import io
import json

import numpy as np
import pytest

from src.core.config import Config, set_config
from src.core.errors import MalformedSpec, NotLogLoss, PreconditionFailed
from src.core.results import CheckStatus, inequality_result
from src.complexity.luckiness import LuckinessFunction
from src.estimators.base import PenaltyFunction, PriorOverClass, dirac
from src.estimators.bayes import generalized_bayes
from src.estimators.erm import erm, penalized_erm
from src.harness.experiments import equalizer_experiment, model_select_experiment
from src.harness.generators import GeneratorFamily, GeneratorSpec, generate, generate_document
from src.harness.rates import (RateEstimator, fit_slope, mean_excess_risk, problem_at, rate_experiment,
                               target_beta)
from src.harness.reports import ResultCollector, result_rows, write_csv, write_json, write_report
from src.measure.montecarlo import McConfig, Method


class TestGenerators:

    def test_deterministic(self):
        spec = GeneratorSpec(GeneratorFamily.RANDOM_FINITE, m=3, n_predictors=4, seed=11)
        assert generate_document(spec) == generate_document(spec)

    def test_threshold_grid(self):
        problem = generate(GeneratorSpec(GeneratorFamily.THRESHOLD_GRID, m=4, noise=0.5))
        assert problem.n_outcomes == 8
        assert problem.n_predictors == 5
        assert problem.is_supervised
        assert problem.fstar_index == 2

    def test_nested_blocks_minimizer_in_first_block(self):
        for seed in range(5):
            spec = GeneratorSpec(GeneratorFamily.NESTED_BLOCKS, m=3, block_sizes=(2, 3), seed=seed)
            problem = generate(spec)
            assert problem.n_predictors == 5
            assert spec.partition().block_of[problem.fstar_index] == 0

    def test_log_loss(self, log_loss_problem):
        assert log_loss_problem.is_log_loss
        assert log_loss_problem.eta == 1.0

    def test_random_supervised(self):
        problem = generate(GeneratorSpec(GeneratorFamily.RANDOM_SUPERVISED, m=3, n_predictors=2, seed=1))
        assert problem.is_supervised
        assert problem.n_outcomes == 6

    def test_from_dict(self):
        spec = GeneratorSpec.from_dict({'family': 'threshold_grid', 'm': 6, 'noise': 0.2})
        assert spec.family is GeneratorFamily.THRESHOLD_GRID
        assert spec.learning_rate == 0.5

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(MalformedSpec):
            GeneratorSpec.from_dict({'family': 'random_finite', 'colour': 'red'})
        with pytest.raises(MalformedSpec):
            GeneratorSpec.from_dict({'m': 3})

    def test_bad_values(self):
        with pytest.raises(MalformedSpec):
            GeneratorSpec('no_such_family')
        with pytest.raises(MalformedSpec):
            GeneratorSpec(GeneratorFamily.THRESHOLD_GRID, noise=1.5)
        with pytest.raises(MalformedSpec):
            GeneratorSpec(GeneratorFamily.RANDOM_FINITE).partition()


class TestMeanExcessRisk:

    def test_dirac_at_minimizer(self, small_problem):
        estimate = mean_excess_risk(small_problem, dirac(small_problem, 0))
        assert estimate.value == 0.0
        assert estimate.method is Method.EXACT

    def test_erm_coin(self, small_problem):
        # ERM errs (picks always_tails) when at most one head shows: 0.4^3 + 3 * 0.6 * 0.4^2
        estimate = mean_excess_risk(small_problem, erm(small_problem))
        assert estimate.value == pytest.approx(0.352 * 0.1)

    def test_monte_carlo_agrees(self, small_problem):
        estimate = mean_excess_risk(small_problem, erm(small_problem), McConfig(4000, seed=2), cap=1)
        assert estimate.method is Method.MONTE_CARLO
        assert abs(estimate.value - 0.0352) <= 5 * estimate.std_error

    def test_monte_carlo_randomized(self, small_problem):
        est = generalized_bayes(small_problem, PriorOverClass.uniform(3))
        exact = mean_excess_risk(small_problem, est).value
        estimate = mean_excess_risk(small_problem, est, McConfig(4000, seed=3), cap=1)
        assert abs(estimate.value - exact) <= 5 * estimate.std_error


class TestRates:

    def test_fit_slope(self):
        n_values = [16, 32, 64, 128]
        assert fit_slope(n_values, [3.0 / n for n in n_values]) == pytest.approx(-1.0)
        assert fit_slope(n_values, [0.5 / np.sqrt(n) for n in n_values]) == pytest.approx(-0.5)

    def test_fit_slope_needs_positive_points(self):
        assert fit_slope([1, 2, 3], [0.0, 0.0, 0.1]) is None

    def test_target_beta(self, small_problem):
        assert target_beta([small_problem]) == 1.0

    def test_problem_at_threshold_schedule(self):
        problem = problem_at(GeneratorSpec(GeneratorFamily.THRESHOLD_GRID), 4)
        assert problem.n == 4
        assert problem.n_outcomes == 16

    def test_problem_at_reuses_base(self):
        spec = GeneratorSpec(GeneratorFamily.RANDOM_FINITE, m=3, n_predictors=3, n=2, seed=6)
        base = generate(spec)
        problem = problem_at(spec, 7, base)
        assert problem.n == 7
        np.testing.assert_array_equal(problem.loss_table, base.loss_table)
        np.testing.assert_array_equal(problem_at(spec, 7).loss_table, base.loss_table)
        assert problem_at(spec, 7).eta == base.eta

    def test_rejects_short_n_list(self):
        spec = GeneratorSpec(GeneratorFamily.RANDOM_FINITE, m=2, n_predictors=3)
        with pytest.raises(PreconditionFailed):
            rate_experiment(spec, n_list=[1, 2, 3])
        with pytest.raises(PreconditionFailed):
            rate_experiment(spec, n_list=[1, 2, 2, 3])

    def test_dirac_is_degenerate(self):
        spec = GeneratorSpec(GeneratorFamily.RANDOM_FINITE, m=2, n_predictors=3, seed=5)
        report = rate_experiment(spec, RateEstimator.DIRAC, n_list=[1, 2, 3, 4])
        assert report.degenerate
        assert report.passed
        assert report.slope is None

    def test_report_shape(self):
        spec = GeneratorSpec(GeneratorFamily.RANDOM_FINITE, m=2, n_predictors=3, seed=5)
        report = rate_experiment(spec, RateEstimator.ERM, n_list=[1, 2, 3, 4])
        assert report.n_values == [1, 2, 3, 4]
        assert report.methods == ["exact"] * 4
        assert report.target == pytest.approx(-1.0 / (2.0 - report.beta))
        assert all(r >= 0 for r in report.risks)
        assert len(report.rows()) == 4
        assert report.to_dict()['estimator'] == "erm"


class TestEqualizer:

    def test_erm(self, small_problem):
        report = equalizer_experiment(small_problem, erm(small_problem))
        assert report.passed
        assert report.spread <= 1e-9
        assert report.samples == 8

    def test_spread_uses_equalizer_tolerance(self, small_problem, tmp_path):
        config = Config(str(tmp_path))
        config.set('settings', 'tolerance.equalizer', 1e-30)
        set_config(config)
        with ResultCollector() as collector:
            report = equalizer_experiment(small_problem, erm(small_problem))
        parts = {r.name: r for r in collector.results}
        assert set(parts) >= {"equalizer: spread", "equalizer: constant", "equalizer: total mass"}
        assert parts["equalizer: spread"].tolerance == 1e-30
        assert parts["equalizer: total mass"].lhs == pytest.approx(1.0, abs=1e-10)
        assert report.result.details['parts'] == 3

    def test_bayes_with_prior_ratio(self, small_problem):
        prior = PriorOverClass.uniform(3)
        est = generalized_bayes(small_problem, prior)
        report = equalizer_experiment(small_problem, est, LuckinessFunction.prior_ratio(prior, est))
        assert report.passed
        assert report.luckiness == "prior-ratio"

    def test_penalized_log_loss(self, log_loss_problem):
        gamma = PenaltyFunction([0.0, 0.3, 0.1])
        est = penalized_erm(log_loss_problem, gamma)
        report = equalizer_experiment(log_loss_problem, est, LuckinessFunction.penalty(gamma, est))
        assert report.passed

    def test_penalty_needs_log_loss(self, small_problem):
        gamma = PenaltyFunction([0.0, 0.3, 0.1])
        est = penalized_erm(small_problem, gamma)
        with pytest.raises(NotLogLoss):
            equalizer_experiment(small_problem, est, LuckinessFunction.penalty(gamma, est))


class TestModelSelect:

    def test_nested_blocks(self):
        spec = GeneratorSpec(GeneratorFamily.NESTED_BLOCKS, m=2, block_sizes=(1, 3), seed=4)
        report = model_select_experiment(spec, PriorOverClass([0.5, 0.5]), [1, 2, 3])
        assert report.k_star == 0
        assert len(report.points) == 3
        assert report.passed
        for point in report.points:
            assert sum(point.selected_blocks) == pytest.approx(1.0)
            assert point.overhead == pytest.approx(np.log(2) / 0.5)

    def test_prior_size(self):
        spec = GeneratorSpec(GeneratorFamily.NESTED_BLOCKS, m=2, block_sizes=(1, 3))
        with pytest.raises(PreconditionFailed):
            model_select_experiment(spec, PriorOverClass.uniform(3), [1])
        with pytest.raises(PreconditionFailed):
            model_select_experiment(spec, PriorOverClass.uniform(2), [])


class TestReports:

    def test_collector_scope(self):
        with ResultCollector() as collector:
            inequality_result("inside", 1.0, 2.0, 0.0)
            inequality_result("broken", 2.0, 1.0, 0.0)
            inequality_result("unsure", 2.0, 1.0, 0.0, on_fail=CheckStatus.INCONCLUSIVE)
        inequality_result("outside", 1.0, 2.0, 0.0)
        assert [r.name for r in collector.results] == ["inside", "broken", "unsure"]
        assert collector.summary() == {'checks': 3, 'failed': 1, 'inconclusive': 1}

    def test_json_cleans_infinities(self):
        stream = io.StringIO()
        write_json({'value': float('inf'), 'list': [1.0, float('-inf')], 'array': np.array([1, 2])}, stream)
        data = json.loads(stream.getvalue())
        assert data == {'value': "inf", 'list': [1.0, "-inf"], 'array': [1, 2]}

    def test_csv_union_of_columns(self):
        stream = io.StringIO()
        write_csv([{'a': 1, 'b': 2}, {'a': 3, 'c': 4}], stream)
        assert stream.getvalue().splitlines() == ["a,b,c", "1,2,", "3,,4"]

    def test_result_rows(self):
        with ResultCollector() as collector:
            inequality_result("check", 1.0, 3.0, 0.0)
        rows = result_rows(collector.results)
        assert rows == [{'name': "check", 'lhs': 1.0, 'rhs': 3.0, 'slack': 2.0, 'tolerance': 0.0,
                         'status': "pass"}]

    def test_write_report_format(self):
        stream = io.StringIO()
        write_report({'x': 1}, [{'y': 2}], "csv", stream)
        assert stream.getvalue() == "y\n2\n"
        stream = io.StringIO()
        write_report({'x': 1}, [{'y': 2}], "json", stream)
        assert json.loads(stream.getvalue()) == {'x': 1}
