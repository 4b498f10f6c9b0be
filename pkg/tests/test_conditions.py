"""
Tests for ESI certification, Bernstein fits, v-central checks and risk bounds
"""

import math

import numpy as np
import pytest

from src.core.errors import DegenerateExcess, PreconditionFailed
from src.core.results import CheckStatus
from src.complexity.luckiness import LuckinessFunction
from src.complexity.shtarkov import shtarkov_generalized
from src.conditions.bernstein import (VFunction, fit_bernstein, kl_renyi_check, kl_renyi_etas, second_moments,
                                      v_central_check)
from src.conditions.esi import (EsiStatement, certify, esi_implications_check, esi_moment, theorem1_identity,
                                theorem1_statement)
from src.conditions.risk_bound import risk_bound_eval
from src.entropify.model import entropify
from src.estimators.base import PenaltyFunction, PriorOverClass, dirac
from src.estimators.bayes import generalized_bayes
from src.estimators.erm import erm, penalized_erm
from src.measure.montecarlo import Method


def _zeros(samples):
    return np.zeros(np.atleast_2d(samples).shape[0])


def _ones(samples):
    return np.ones(np.atleast_2d(samples).shape[0])


class TestEsiStatement:

    def test_trivial_statement_has_unit_moment(self, small_problem):
        stmt = EsiStatement(_zeros, _zeros, 1.0)
        moment = esi_moment(small_problem, stmt)
        assert moment.value == pytest.approx(1.0)
        assert moment.method is Method.EXACT
        assert certify(stmt, moment).passed

    def test_violated_statement_fails(self, small_problem):
        stmt = EsiStatement(_ones, _zeros, 0.5, name="violated")
        moment = esi_moment(small_problem, stmt)
        assert moment.value == pytest.approx(math.exp(0.5))
        assert certify(stmt, moment).status is CheckStatus.FAIL

    def test_needs_positive_eta(self):
        with pytest.raises(PreconditionFailed):
            EsiStatement(_zeros, _zeros, 0.0)

    def test_implications_reject_non_esi(self, small_problem):
        with pytest.raises(PreconditionFailed):
            esi_implications_check(small_problem, EsiStatement(_ones, _zeros, 1.0))


class TestTheorem1:

    def test_identity_for_erm(self, random_problems):
        for problem in random_problems:
            result = theorem1_identity(entropify(problem), erm(problem))
            assert result.passed, result

    def test_identity_for_dirac(self, small_problem):
        model = entropify(small_problem)
        for f in range(3):
            assert theorem1_identity(model, dirac(small_problem, f)).passed

    def test_identity_for_bayes_with_prior_ratio(self, random_problems):
        for problem in random_problems:
            prior = PriorOverClass.uniform(problem.n_predictors)
            est = generalized_bayes(problem, prior)
            w = LuckinessFunction.prior_ratio(prior, est)
            assert theorem1_identity(entropify(problem), est, w).passed

    def test_identity_with_penalty_luckiness(self, small_problem):
        gamma = PenaltyFunction([0.0, 0.2, 0.4])
        est = penalized_erm(small_problem, gamma)
        w = LuckinessFunction.penalty(gamma, est)
        result = theorem1_identity(entropify(small_problem), est, w)
        assert result.passed
        assert result.details['method'] == "exact"

    def test_implications(self, small_problem):
        model = entropify(small_problem)
        est = erm(small_problem)
        report = shtarkov_generalized(model, est)
        result = esi_implications_check(small_problem, theorem1_statement(model, est, None, report))
        assert result.passed
        assert result.details['moment'] == pytest.approx(1.0, abs=1e-9)


class TestBernstein:

    def test_fit_coin(self, small_problem):
        # excess losses vs always_heads: (+-0.5) and (+-0.2), excess risks 0.1 and 0.04
        np.testing.assert_allclose(second_moments(small_problem), [0.0, 0.25, 0.04])
        assert fit_bernstein(small_problem, 0.0).B == pytest.approx(0.25)
        assert fit_bernstein(small_problem, 1.0).B == pytest.approx(2.5)
        assert fit_bernstein(small_problem, 0.5).B == pytest.approx(0.25 / math.sqrt(0.1))

    def test_beta_range(self, small_problem):
        with pytest.raises(PreconditionFailed):
            fit_bernstein(small_problem, 1.5)

    def test_degenerate_excess(self, make_problem):
        problem = make_problem([[0.0, 0.5], [0.5, 0.0]], [0.5, 0.5])
        assert fit_bernstein(problem, 0.0).B == pytest.approx(0.25)
        with pytest.raises(DegenerateExcess):
            fit_bernstein(problem, 0.5)

    def test_single_predictor_is_vacuous(self, make_problem):
        fit = fit_bernstein(make_problem([[0.1, 0.3]], [0.5, 0.5]), 1.0)
        assert fit.vacuous
        assert fit.B == 0.0

    def test_v_from_fit(self, small_problem):
        v = VFunction.from_bernstein(fit_bernstein(small_problem, 0.0))
        assert v(0.1) == pytest.approx(0.4)
        assert v(0.5) == pytest.approx(1.0)

    def test_v_from_vacuous_fit_is_capped(self, make_problem):
        v = VFunction.from_bernstein(fit_bernstein(make_problem([[0.1, 0.3]], [0.5, 0.5]), 0.0))
        assert v(1e-6) == 1.0

    def test_v_rejects_bad_arguments(self):
        with pytest.raises(PreconditionFailed):
            VFunction(0.0, 1.0)
        with pytest.raises(PreconditionFailed):
            VFunction.central(1.0)(0.0)


class TestCentral:

    def test_strongly_central(self, small_problem):
        # E[exp(-eta R_f)] <= 1 for every f once eta <= 2 log 1.5
        assert v_central_check(small_problem, VFunction.central(0.5), [1e-3, 0.1]).passed

    def test_fails_at_small_gamma(self, small_problem):
        result = v_central_check(small_problem, VFunction.central(1.0), [1e-3, 0.1])
        assert result.status is CheckStatus.FAIL
        assert result.details['predictor'] == 1
        assert result.details['gamma'] == pytest.approx(1e-3)

    def test_empty_grid(self, small_problem):
        with pytest.raises(PreconditionFailed):
            v_central_check(small_problem, VFunction.central(0.5), [])

    def test_kl_renyi_etas(self):
        assert kl_renyi_etas(VFunction.central(0.8), 0.1) == [0.4, 0.2]

    def test_kl_renyi_bridge(self, small_problem):
        v = VFunction.central(0.5)
        for f in range(3):
            assert kl_renyi_check(small_problem, f, 0.1, v).passed


class TestRiskBound:

    def test_erm(self, small_problem):
        bound = risk_bound_eval(entropify(small_problem), erm(small_problem), None, 0.1, VFunction.central(0.5))
        assert bound.esi.passed
        assert bound.v == pytest.approx(0.5)
        assert bound.report.eta == pytest.approx(0.25)

    def test_bayes(self, small_problem):
        prior = PriorOverClass.uniform(3)
        est = generalized_bayes(small_problem, prior)
        w = LuckinessFunction.prior_ratio(prior, est)
        bound = risk_bound_eval(entropify(small_problem), est, w, 0.1, VFunction.central(0.5))
        assert bound.esi.passed

    def test_sides_are_sample_functions(self, small_problem):
        bound = risk_bound_eval(entropify(small_problem), erm(small_problem), None, 0.1, VFunction.central(0.5))
        samples = np.array([[0, 0, 0], [1, 1, 1]])
        # ERM picks always_heads then always_tails
        np.testing.assert_allclose(bound.lhs_risk(samples), [0.0, 0.1])
        assert bound.rhs_bound(samples).shape == (2,)

    def test_needs_central_condition(self, small_problem):
        with pytest.raises(PreconditionFailed):
            risk_bound_eval(entropify(small_problem), erm(small_problem), None, 1e-3, VFunction.central(1.0))
