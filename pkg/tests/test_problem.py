"""
Tests for problem building, standing assumptions, risks and partitions
"""

import json

import numpy as np
import pytest

from src.core.errors import AssumptionViolated, BadPartition, IndexOutOfRange, MalformedSpec
from src.core.events import EventType, subscribe
from src.problem.builder import build_problem, load_problem, problem_to_spec
from src.problem.partition import Partition, load_partition
from src.problem.risk import (
    excess_loss,
    excess_loss_table,
    excess_risks,
    outcome_counts,
    risk,
    risks,
    sample_excess_losses,
)

TOL = 1e-12


class TestBuildProblem:
    """Parsing, risk minimizer and rejection paths"""

    def test_singleton_class(self, make_problem):
        problem = make_problem([[0.1, 0.4]], [0.3, 0.7])
        assert problem.fstar_index == 0

    def test_tie_goes_to_lowest_index(self, make_problem):
        problem = make_problem([[0.3, 0.1], [0.2, 0.0], [0.2, 0.0]], [0.5, 0.5])
        assert problem.fstar_index == 1

    def test_a1_violation(self, make_problem):
        with pytest.raises(AssumptionViolated) as info:
            make_problem([[0.0, 0.0], [0.9, 0.0]], [0.5, 0.5])
        assert info.value.assumption == "A1"
        assert info.value.pair == (1, 0)
        assert info.value.outcome == 0

    def test_allow_unscaled_rescales(self):
        seen = []
        subscribe(EventType.PROBLEM_RESCALED, lambda event: seen.append(event.data['factor']))
        doc = {'outcomes': ['a', 'b'], 'p': [0.5, 0.5], 'eta': 1.0, 'n': 1,
               'predictors': [{'losses': [0.0, 0.0]}, {'losses': [0.9, 0.1]}]}
        problem = build_problem(doc, allow_unscaled=True)
        gaps = problem.loss_table.max(axis=0) - problem.loss_table.min(axis=0)
        assert gaps.max() == pytest.approx(0.5)
        assert seen == [pytest.approx(0.5 / 0.9)]

    @pytest.mark.parametrize("missing", ['outcomes', 'p', 'predictors', 'eta', 'n'])
    def test_missing_fields(self, missing):
        doc = {'outcomes': ['a'], 'p': [1.0], 'predictors': [{'losses': [0.0]}], 'eta': 1.0, 'n': 1}
        del doc[missing]
        with pytest.raises(MalformedSpec):
            build_problem(doc)

    def test_masses_must_sum_to_one(self, make_problem):
        with pytest.raises(MalformedSpec):
            make_problem([[0.0, 0.1]], [0.5, 0.6])

    def test_duplicate_outcomes(self):
        doc = {'outcomes': ['a', 'a'], 'p': [0.5, 0.5], 'predictors': [{'losses': [0, 0]}],
               'eta': 1.0, 'n': 1}
        with pytest.raises(MalformedSpec):
            build_problem(doc)

    def test_non_integer_n(self, make_problem):
        with pytest.raises(MalformedSpec):
            make_problem([[0.0, 0.1]], [0.5, 0.5], n=1.5)

    def test_load_from_file(self, small_problem):
        assert small_problem.n == 3
        assert small_problem.eta == pytest.approx(0.5)
        assert small_problem.fstar_index == 0
        assert small_problem.predictors.names == ('always_heads', 'always_tails', 'hedge')

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        with pytest.raises(MalformedSpec):
            load_problem(path)

    def test_spec_round_trip_keeps_tables(self, small_problem):
        rebuilt = build_problem(json.loads(json.dumps(problem_to_spec(small_problem))))
        np.testing.assert_allclose(rebuilt.loss_table, small_problem.loss_table)
        assert rebuilt.fstar_index == small_problem.fstar_index


class TestSupervised:
    """A2 and the supervised parameterization"""

    def test_supervised_loads(self, supervised_problem):
        assert supervised_problem.is_supervised
        assert supervised_problem.lipschitz_L == pytest.approx(0.5)
        np.testing.assert_allclose(supervised_problem.predictors.predictor_values[0], [1, 1, 1, 1])

    def test_a2_violation(self, data_dir):
        doc = json.loads((data_dir / "supervised.json").read_text())
        doc['lipschitz'] = 0.1
        with pytest.raises(AssumptionViolated) as info:
            build_problem(doc)
        assert info.value.assumption == "A2"

    def test_supervised_needs_features(self, data_dir):
        doc = json.loads((data_dir / "supervised.json").read_text())
        del doc['predictors'][0]['features']
        with pytest.raises(MalformedSpec):
            build_problem(doc)


class TestLogLoss:
    """Log-loss documents must be correct density models"""

    def test_valid_log_loss(self, data_dir):
        problem = load_problem(data_dir / "log_loss.json")
        assert problem.is_log_loss
        assert problem.fstar_index == 0

    def test_row_not_a_density(self):
        doc = {'outcomes': ['a', 'b'], 'p': [0.5, 0.5], 'loss': 'log', 'eta': 1.0, 'n': 1,
               'predictors': [{'losses': [0.6931471805599453] * 2}, {'losses': [0.5, 0.5]}]}
        with pytest.raises(AssumptionViolated) as info:
            build_problem(doc)
        assert info.value.assumption == "LOGLOSS"

    def test_misspecified_model(self):
        doc = {'outcomes': ['a', 'b'], 'p': [0.7, 0.3], 'loss': 'log', 'eta': 1.0, 'n': 1,
               'predictors': [{'losses': [0.6931471805599453] * 2}]}
        with pytest.raises(AssumptionViolated):
            build_problem(doc)


class TestRisk:
    """Risks, excess risks and excess losses"""

    def test_risks(self, small_problem):
        np.testing.assert_allclose(risks(small_problem), [0.2, 0.3, 0.24], atol=TOL)
        assert risk(small_problem, 1) == pytest.approx(0.3)

    def test_excess_risks_zero_at_minimizer(self, small_problem):
        excess = excess_risks(small_problem)
        assert excess[small_problem.fstar_index] == 0.0
        np.testing.assert_allclose(excess, [0.0, 0.1, 0.04], atol=TOL)

    def test_excess_loss_of_sample(self, small_problem):
        # R_1 = (0.5, -0.5) per outcome
        assert excess_loss(small_problem, 1, [0, 0, 1]) == pytest.approx(0.5)
        assert excess_loss(small_problem, 0, [1, 1, 0]) == 0.0

    def test_empty_sample(self, small_problem):
        assert excess_loss(small_problem, 2, []) == 0.0

    def test_bad_indices(self, small_problem):
        with pytest.raises(IndexOutOfRange):
            risk(small_problem, 3)
        with pytest.raises(IndexOutOfRange):
            excess_loss(small_problem, 0, [0, 2])
        with pytest.raises(IndexOutOfRange):
            excess_loss(small_problem, 0, [0, 0, 0, 0])

    def test_counts_and_batched_excess(self, small_problem):
        samples = np.array([[0, 0, 1], [1, 1, 1]])
        counts = outcome_counts(samples, 2)
        np.testing.assert_array_equal(counts, [[2, 1], [0, 3]])
        batched = sample_excess_losses(small_problem, counts)
        expected = excess_loss_table(small_problem)[:, samples].sum(axis=2).T
        np.testing.assert_allclose(batched, expected, atol=TOL)


class TestPartition:
    """Disjoint covering blocks"""

    def test_consecutive(self):
        partition = Partition.consecutive([1, 3])
        assert partition.size == 2
        np.testing.assert_array_equal(partition.block_of, [0, 1, 1, 1])
        np.testing.assert_array_equal(partition.indices(1), [1, 2, 3])

    def test_from_assignment(self):
        partition = Partition.from_assignment([2, 0, 2])
        assert partition.blocks == ((1,), (0, 2))

    @pytest.mark.parametrize("blocks", [((0, 1), (1, 2)), ((0,), (2,)), ((0, 1, 2), ())])
    def test_bad_partitions(self, blocks):
        with pytest.raises(BadPartition):
            Partition(blocks, 3)

    def test_load_partition(self, data_dir):
        partition = load_partition(data_dir / "coin_partition.json", 3)
        assert partition.blocks == ((0,), (1, 2))
