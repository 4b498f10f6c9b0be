"""
Tests for luckiness functions, Shtarkov integrals, NML and decompositions
"""

import math

import numpy as np
import pytest

from src.core.errors import BadPartition, MalformedSpec, PreconditionFailed
from src.core.results import CheckStatus
from src.complexity.decomposition import (best_block, composite_decomposition_check, exact_block_bounds,
                                          partition_bound_check, two_part_bound_check)
from src.complexity.luckiness import LuckinessFunction, block_masses
from src.complexity.nml import nml_density, nml_regret, spread
from src.complexity.shtarkov import (comp_full, comp_generalized, comp_luckiness, comp_max, maximum_likelihood,
                                     sample_complexities, shtarkov_generalized, shtarkov_luckiness, shtarkov_simple)
from src.entropify.model import entropify
from src.estimators.base import PenaltyFunction, PriorOverClass, dirac
from src.estimators.bayes import generalized_bayes
from src.estimators.erm import erm, penalized_erm
from src.problem.partition import Partition
from src.problem.risk import excess_loss

TOL = 1e-10


class TestLuckiness:

    def test_constant(self, small_problem):
        w = LuckinessFunction.constant(3, 2.0)
        assert w([0, 1, 1], 2) == pytest.approx(2.0)
        assert w.ignores_predictor

    def test_constant_rejects_nonpositive(self):
        for c in (-1.0, 0.0, math.inf):
            with pytest.raises(MalformedSpec):
                LuckinessFunction.constant(3, c)

    def test_prior_ratio(self, small_problem):
        prior = PriorOverClass([0.5, 0.25, 0.25])
        est = generalized_bayes(small_problem, prior)
        w = LuckinessFunction.prior_ratio(prior, est)
        zsample = [0, 1, 1]
        posterior = est(zsample)
        for f in range(3):
            assert w(zsample, f) == pytest.approx(prior.masses[f] / posterior[f])
        assert not w.ignores_predictor

    def test_penalty_uses_selected_predictor(self, small_problem):
        gamma = PenaltyFunction([0.1, 0.2, 0.3])
        est = erm(small_problem)
        w = LuckinessFunction.penalty(gamma, est)
        # ERM picks always_tails on [0, 1, 1]
        assert w([0, 1, 1], 0) == pytest.approx(math.exp(-0.2))

    def test_penalty_needs_deterministic(self, small_problem):
        est = generalized_bayes(small_problem, PriorOverClass.uniform(3))
        with pytest.raises(PreconditionFailed):
            LuckinessFunction.penalty(PenaltyFunction.zero(3), est)

    def test_scaled(self, small_problem):
        w = LuckinessFunction.constant(3).scaled(3.0)
        assert w([0, 0, 0], 1) == pytest.approx(3.0)
        with pytest.raises(PreconditionFailed):
            w.scaled(0.0)

    def test_composite_shape_checks(self, small_problem):
        partition = Partition([[0], [1, 2]], 3)
        est = erm(small_problem)
        with pytest.raises(BadPartition):
            LuckinessFunction.composite(partition, PriorOverClass.uniform(2), [LuckinessFunction.constant(3)], est)

    def test_block_masses(self):
        partition = Partition([[0, 2], [1]], 3)
        masses = block_masses(np.array([[0.2, 0.3, 0.5]]), partition)
        np.testing.assert_allclose(masses, [[0.7, 0.3]])


class TestShtarkov:

    def test_dirac_integral_is_one(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            for f in range(problem.n_predictors):
                report = shtarkov_simple(model, dirac(problem, f))
                assert report.log_shtarkov == pytest.approx(0.0, abs=TOL)
                assert report.comp == pytest.approx(0.0, abs=TOL)

    def test_max_matches_maximum_likelihood(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            top = comp_max(model)
            ml = shtarkov_simple(model, maximum_likelihood(model))
            assert top.comp == pytest.approx(ml.comp, abs=TOL)

    def test_max_dominates_erm(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            assert shtarkov_simple(model, erm(problem)).comp <= comp_max(model).comp + TOL

    def test_max_range(self, random_problems):
        # 0 <= comp_max <= log|F| / eta
        for problem in random_problems:
            model = entropify(problem)
            comp = comp_max(model).comp
            assert comp >= -TOL
            assert comp <= math.log(problem.n_predictors) / problem.eta + TOL

    def test_singleton_block_has_zero_max(self, small_problem):
        assert comp_max(entropify(small_problem), block=[2]).comp == pytest.approx(0.0, abs=TOL)

    def test_simple_needs_deterministic(self, small_problem):
        est = generalized_bayes(small_problem, PriorOverClass.uniform(3))
        with pytest.raises(PreconditionFailed):
            shtarkov_simple(entropify(small_problem), est)

    def test_luckiness_rejects_predictor_dependent_w(self, small_problem):
        prior = PriorOverClass.uniform(3)
        est = erm(small_problem)
        w = LuckinessFunction.prior_ratio(prior, est)
        with pytest.raises(PreconditionFailed):
            shtarkov_luckiness(entropify(small_problem), est, w)

    def test_constant_luckiness_cancels(self, small_problem):
        model = entropify(small_problem)
        est = erm(small_problem)
        w = LuckinessFunction.constant(3, 2.0)
        simple = shtarkov_simple(model, est).comp
        assert comp_luckiness(model, est, w, [0, 1, 1]) == pytest.approx(simple, abs=TOL)

    def test_zero_integral_is_rejected(self, small_problem):
        model = entropify(small_problem)
        est = erm(small_problem)
        with pytest.raises(PreconditionFailed):
            sample_complexities(model, est, None, np.array([[0, 1, 1]]), -math.inf)

    def test_penalty_luckiness(self, small_problem):
        model = entropify(small_problem)
        gamma = PenaltyFunction([0.0, 0.2, 0.1])
        est = penalized_erm(small_problem, gamma)
        w = LuckinessFunction.penalty(gamma, est)
        report = shtarkov_luckiness(model, est, w)
        zsample = [0, 1, 1]
        picked = est(zsample)
        expected = (gamma.gamma[picked] + report.log_shtarkov) / small_problem.eta
        assert comp_luckiness(model, est, w, zsample, report) == pytest.approx(expected, abs=TOL)

    def test_prior_ratio_bayes_at_most_one(self, random_problems):
        for problem in random_problems:
            prior = PriorOverClass.uniform(problem.n_predictors)
            est = generalized_bayes(problem, prior)
            report = shtarkov_generalized(entropify(problem), est, LuckinessFunction.prior_ratio(prior, est))
            assert report.log_shtarkov <= TOL

    def test_prior_ratio_bayes_log_loss_is_one(self, log_loss_problem):
        prior = PriorOverClass.uniform(log_loss_problem.n_predictors)
        est = generalized_bayes(log_loss_problem, prior)
        report = shtarkov_generalized(entropify(log_loss_problem), est, LuckinessFunction.prior_ratio(prior, est))
        assert report.log_shtarkov == pytest.approx(0.0, abs=1e-9)

    def test_full_of_dirac_is_excess_loss(self, small_problem):
        model = entropify(small_problem)
        zsample = [0, 1, 1]
        for f in range(3):
            assert comp_full(model, dirac(small_problem, f), None, zsample) == pytest.approx(
                excess_loss(small_problem, f, zsample), abs=TOL)

    def test_generalized_of_deterministic_matches_simple(self, small_problem):
        model = entropify(small_problem)
        est = erm(small_problem)
        assert shtarkov_generalized(model, est).log_shtarkov == pytest.approx(
            shtarkov_simple(model, est).log_shtarkov, abs=TOL)
        assert comp_generalized(model, est, None, [0, 0, 1]) == pytest.approx(
            shtarkov_simple(model, est).comp, abs=TOL)

    def test_wrong_sample_length(self, small_problem):
        model = entropify(small_problem)
        with pytest.raises(PreconditionFailed):
            comp_full(model, erm(small_problem), None, [0, 1])

    def test_report_dict(self, small_problem):
        data = shtarkov_simple(entropify(small_problem), erm(small_problem)).to_dict()
        assert data['name'] == "simple"
        assert data['method'] == "exact"
        assert data['finite'] is True


class TestNml:

    def test_density_integrates_to_one(self, random_problems):
        for problem in random_problems:
            nml = nml_density(entropify(problem), erm(problem))
            assert nml.total_mass() == pytest.approx(1.0, abs=1e-9)

    def test_log_shtarkov_agrees(self, small_problem):
        model = entropify(small_problem)
        est = erm(small_problem)
        assert nml_density(model, est).log_shtarkov == pytest.approx(
            shtarkov_simple(model, est).log_shtarkov, abs=TOL)

    def test_equalizer(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            est = erm(problem)
            regret = nml_regret(model, est)
            assert spread(regret) <= 1e-9
            assert regret[0] == pytest.approx(nml_density(model, est).log_shtarkov, abs=1e-9)

    def test_equalizer_with_luckiness(self, small_problem):
        model = entropify(small_problem)
        gamma = PenaltyFunction([0.0, 0.3, 0.1])
        est = penalized_erm(small_problem, gamma)
        w = LuckinessFunction.penalty(gamma, est)
        assert spread(nml_regret(model, est, w)) <= 1e-9

    def test_regret_needs_deterministic(self, small_problem):
        est = generalized_bayes(small_problem, PriorOverClass.uniform(3))
        with pytest.raises(PreconditionFailed):
            nml_regret(entropify(small_problem), est)

    def test_spread_of_empty(self):
        assert spread(np.array([])) == 0.0


class TestDecomposition:

    def test_partition_bound(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            partition = Partition.singletons(problem.n_predictors)
            assert partition_bound_check(model, partition, erm(problem)).passed

    def test_partition_bound_single_block(self, small_problem):
        model = entropify(small_problem)
        result = partition_bound_check(model, Partition.single_block(3), erm(small_problem))
        assert result.status is CheckStatus.PASS

    def test_partition_mismatch(self, small_problem):
        with pytest.raises(BadPartition):
            partition_bound_check(entropify(small_problem), Partition.singletons(2), erm(small_problem))

    def test_composite_decomposition(self, small_problem):
        model = entropify(small_problem)
        partition = Partition([[0], [1, 2]], 3)
        est = generalized_bayes(small_problem, PriorOverClass.uniform(3))
        result = composite_decomposition_check(model, partition, PriorOverClass([0.3, 0.7]), [None, None], est)
        assert result.passed

    def test_composite_decomposition_random(self, random_problems):
        for problem in random_problems:
            if problem.n_predictors < 2:
                continue
            partition = Partition.consecutive([1, problem.n_predictors - 1])
            est = generalized_bayes(problem, PriorOverClass.uniform(problem.n_predictors))
            result = composite_decomposition_check(entropify(problem), partition, PriorOverClass.uniform(2),
                                                   [None, None], est)
            assert result.passed

    def test_singleton_block_bounds_vanish(self, small_problem):
        bounds = exact_block_bounds(entropify(small_problem), Partition.singletons(3))
        np.testing.assert_allclose(bounds, 0.0, atol=TOL)

    def test_best_block(self, small_problem):
        partition = Partition([[0], [1, 2]], 3)
        assert best_block(entropify(small_problem), partition, PriorOverClass.uniform(2)) == (0, 0)

    def test_two_part_bound_with_exact_bounds(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            partition = Partition.from_assignment([f % 2 for f in range(problem.n_predictors)])
            pi_K = PriorOverClass.uniform(partition.size)
            bounds = exact_block_bounds(model, partition)
            assert two_part_bound_check(model, partition, pi_K, bounds).passed

    def test_two_part_bound_coin(self, small_problem):
        model = entropify(small_problem)
        partition = Partition([[0], [1, 2]], 3)
        bounds = exact_block_bounds(model, partition)
        result = two_part_bound_check(model, partition, PriorOverClass([0.5, 0.5]), bounds)
        assert result.passed
        assert result.details['k_star'] == 0
