"""
Tests for entropification and annealed expectations
"""

import math

import numpy as np
import pytest

from src.core.errors import IndexOutOfRange, PreconditionFailed
from src.entropify.annealed import annealed_expectation
from src.entropify.model import entropify
from src.measure.enumerator import exact_expectation
from src.problem.risk import excess_loss_table, excess_risks

TOL = 1e-10


class TestEntropifiedModel:
    """q_f densities and their normalizers"""

    def test_rows_are_densities(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            totals = np.exp(model.log_q) @ problem.space.nu_weights
            np.testing.assert_allclose(totals, 1.0, atol=TOL)

    def test_normalizer_range(self, random_problems):
        # c1(f) lies in [e^{-eta/2}, e^{eta/2}] when losses differ by at most 1/2
        for problem in random_problems:
            model = entropify(problem)
            assert np.all(model.log_c1 >= -problem.eta / 2 - TOL)
            assert np.all(model.log_c1 <= problem.eta / 2 + TOL)

    def test_minimizer_density_is_p(self, small_problem):
        model = entropify(small_problem)
        f_star = small_problem.fstar_index
        zsample = [0, 1, 1]
        log_p = float(np.log(small_problem.p_true.masses[zsample]).sum())
        assert model.q_density(f_star, zsample) == pytest.approx(log_p, abs=TOL)

    def test_log_loss_density_is_predictor(self, log_loss_problem):
        # eta = 1 on a correct log-loss model: q_f = exp(-loss_f)
        model = entropify(log_loss_problem)
        np.testing.assert_allclose(model.log_q, -log_loss_problem.loss_table, atol=1e-9)

    def test_normalizer_is_product(self, small_problem):
        model = entropify(small_problem)
        eta = small_problem.eta
        table = excess_loss_table(small_problem)[1]
        c_n = exact_expectation(small_problem, lambda s: np.exp(-eta * table[s].sum(axis=1)))
        assert model.normalizer(1) == pytest.approx(math.log(c_n), abs=TOL)

    def test_sample_densities_match_single(self, small_problem):
        model = entropify(small_problem)
        samples = np.array([[0, 1, 1], [1, 1, 1]])
        batch = model.log_q_samples(samples)
        for row, sample in enumerate(samples):
            for f in range(small_problem.n_predictors):
                assert batch[row, f] == pytest.approx(model.q_density(f, sample), abs=TOL)

    def test_annealed_risk_below_risk(self, random_problems):
        for problem in random_problems:
            model = entropify(problem)
            assert np.all(model.annealed_excess_risks() <= excess_risks(problem) + TOL)

    def test_annealed_excess_risk_coin(self, small_problem):
        model = entropify(small_problem)
        # -(1/eta) log(0.6 e^{-0.25} + 0.4 e^{0.25}) for always_tails
        expected = -2.0 * math.log(0.6 * math.exp(-0.25) + 0.4 * math.exp(0.25))
        assert model.annealed_excess_risk(1) == pytest.approx(expected, rel=1e-12)
        table = excess_loss_table(small_problem)
        for f in range(3):
            assert model.annealed_excess_risk(f) == pytest.approx(
                annealed_expectation(table[f], small_problem.p_true.masses, 0.5), abs=TOL)
        assert model.annealed_excess_risk(0) == pytest.approx(0.0, abs=TOL)

    def test_at_eta_is_cached(self, small_problem):
        model = entropify(small_problem)
        assert model.at_eta(0.25) is model.at_eta(0.25)
        assert model.at_eta(None) is model
        assert model.at_eta(0.25).eta == 0.25

    def test_entropified_measure_sums_to_one(self, small_problem):
        model = entropify(small_problem)
        measure = model.entropified_measure(1)
        assert exact_expectation(measure, lambda s: np.ones(len(s))) == pytest.approx(1.0, abs=TOL)

    def test_density_ratio_bound(self, small_problem):
        model = entropify(small_problem)
        ratio = np.exp(model.log_q[2]) / small_problem.p_true.masses
        assert model.density_ratio_bound(2) == pytest.approx(ratio.max(), rel=1e-12)

    def test_bad_index(self, small_problem):
        with pytest.raises(IndexOutOfRange):
            entropify(small_problem).normalizer(5)


class TestAnnealed:
    """Annealed expectation and Jensen"""

    def test_constant(self):
        assert annealed_expectation([0.3, 0.3], [0.5, 0.5], 2.0) == pytest.approx(0.3)

    def test_jensen(self):
        values, masses = np.array([0.0, 1.0]), np.array([0.5, 0.5])
        value = annealed_expectation(values, masses, 1.0)
        assert value == pytest.approx(-math.log((1 + math.exp(-1)) / 2))
        assert value < 0.5

    def test_zero_mass_atoms_ignored(self):
        assert annealed_expectation([0.2, np.inf], [1.0, 0.0], 1.0) == pytest.approx(0.2)

    def test_eta_positive(self):
        with pytest.raises(PreconditionFailed):
            annealed_expectation([0.0], [1.0], 0.0)
