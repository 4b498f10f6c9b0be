"""
Tests for the core package: config, events, results, errors and command dispatch
"""

import argparse
import json
import math

import pytest

from src.core.commands import Command, CommandManager, CommandOutcome, CommandType
from src.core.config import Config, get_config, set_config, setting, tolerance
from src.core.errors import AssumptionViolated, ComplexityError, IndexOutOfRange, MalformedSpec, PreconditionFailed
from src.core.events import EventManager, EventType, publish, subscribe
from src.core.results import CheckStatus, combine_results, identity_result, inequality_result
from src.harness.reports import ResultCollector

TOL = 1e-10


class TestConfig:
    """Settings documents, defaults and dotted lookups"""

    def test_missing_file_gives_defaults(self, tmp_path):
        config = Config(str(tmp_path))
        data = config.load('settings')
        assert data['engine']['exact_cap'] == 10 ** 7
        assert data['tolerance']['identity'] == pytest.approx(1e-9)
        assert data['tolerance']['equalizer'] == pytest.approx(1e-9)
        assert data['tolerance']['normalization'] == pytest.approx(1e-10)
        assert not (tmp_path / "settings.json").exists()

    def test_file_overrides_merge_into_defaults(self, tmp_path):
        (tmp_path / "settings.json").write_text(json.dumps({'engine': {'seed': 7}}))
        config = Config(str(tmp_path))
        assert config.get('settings', 'engine.seed') == 7
        assert config.get('settings', 'engine.mc_trials') == 2000

    def test_malformed_json_falls_back(self, tmp_path):
        (tmp_path / "settings.json").write_text("{not json")
        config = Config(str(tmp_path))
        assert config.get('settings', 'harness.slope_tolerance') == pytest.approx(0.15)

    def test_bad_values_rejected(self, tmp_path):
        (tmp_path / "settings.json").write_text(json.dumps({'engine': {'mc_trials': 0}}))
        with pytest.raises(MalformedSpec):
            Config(str(tmp_path)).load('settings')
        (tmp_path / "settings.json").write_text(json.dumps({'tolerance': {'identity': -1.0}}))
        with pytest.raises(MalformedSpec):
            Config(str(tmp_path)).load('settings')

    def test_set_save_reload(self, tmp_path):
        config = Config(str(tmp_path))
        config.set('settings', 'engine.seed', 11)
        config.save('settings')
        other = Config(str(tmp_path))
        assert other.get('settings', 'engine.seed') == 11

    def test_unknown_key_default(self):
        assert get_config().get('settings', 'engine.nothing', default='x') == 'x'

    def test_global_setting_and_tolerance(self, tmp_path):
        config = Config(str(tmp_path))
        config.set('settings', 'tolerance.identity', 1e-6)
        set_config(config)
        assert tolerance('identity') == pytest.approx(1e-6)
        assert setting('engine.chunk_size') == 1 << 16


class TestEvents:
    """Publish-subscribe with isolated listeners"""

    def test_publish_reaches_listener(self):
        seen = []
        subscribe(EventType.MC_FALLBACK, lambda event: seen.append(event.data['trials']))
        publish(EventType.MC_FALLBACK, trials=5)
        assert seen == [5]

    def test_failing_listener_does_not_block_others(self):
        manager = EventManager()
        seen = []

        def broken(event):
            raise RuntimeError("listener failure")

        manager.subscribe("x", broken)
        manager.subscribe("x", lambda event: seen.append(event.type))
        manager.publish("x")
        assert seen == ["x"]

    def test_queued_events_fire_in_order(self):
        manager = EventManager()
        seen = []
        manager.subscribe("x", lambda event: seen.append(event.data['i']))
        for i in range(3):
            manager.queue_event("x", i=i)
        assert seen == []
        manager.process_queued_events()
        assert seen == [0, 1, 2]
        stats = manager.get_stats()
        assert stats['events_queued'] == 3
        assert stats['pending'] == 0
        assert stats['by_type'] == {"x": 3}

    def test_events_are_numbered(self):
        manager = EventManager()
        seen = []
        manager.subscribe(EventType.EXPERIMENT_POINT, seen.append)
        manager.publish(EventType.EXPERIMENT_POINT, n=1)
        manager.publish(EventType.EXPERIMENT_POINT, n=2)
        assert [event.seq for event in seen] == [1, 2]
        assert manager.get_stats()['by_type'] == {"experiment_point": 2}

    def test_unsubscribe(self):
        manager = EventManager()
        seen = []
        callback = seen.append
        manager.subscribe("x", callback)
        manager.unsubscribe("x", callback)
        manager.publish("x")
        assert seen == []


class TestResults:
    """Inequality, identity and combined verdicts"""

    def test_inequality_pass_and_slack(self):
        result = inequality_result("ineq", 1.0, 2.0, TOL)
        assert result.passed
        assert result.slack == pytest.approx(1.0)

    def test_inequality_within_tolerance(self):
        assert inequality_result("ineq", 1.0 + 1e-12, 1.0, TOL).passed

    def test_inequality_fail(self):
        result = inequality_result("ineq", 2.0, 1.0, TOL)
        assert result.status is CheckStatus.FAIL

    def test_on_fail_status(self):
        result = inequality_result("search", 2.0, 1.0, TOL, on_fail=CheckStatus.INCONCLUSIVE)
        assert result.status is CheckStatus.INCONCLUSIVE

    def test_equal_infinities_are_tight(self):
        result = inequality_result("inf", math.inf, math.inf, TOL)
        assert result.passed
        assert result.slack == 0.0

    def test_identity(self):
        assert identity_result("id", 1.0, 1.0 + 1e-11, TOL).passed
        assert not identity_result("id", 1.0, 1.1, TOL).passed

    def test_combine_worst_slack_decides(self):
        parts = [inequality_result("a", 0.0, 1.0, TOL), inequality_result("b", 0.0, 0.5, TOL)]
        combined = combine_results("both", parts, TOL)
        assert combined.passed
        assert combined.slack == pytest.approx(0.5)
        assert combined.details['worst'] == "b"

    def test_combine_inconclusive_and_fail(self):
        passing = inequality_result("a", 0.0, 1.0, TOL)
        unknown = inequality_result("b", 1.0, 0.0, TOL, on_fail=CheckStatus.INCONCLUSIVE)
        failing = inequality_result("c", 1.0, 0.0, TOL)
        assert combine_results("x", [passing, unknown], TOL).status is CheckStatus.INCONCLUSIVE
        assert combine_results("y", [passing, unknown, failing], TOL).status is CheckStatus.FAIL

    def test_results_are_published(self):
        with ResultCollector() as collector:
            inequality_result("a", 0.0, 1.0, TOL)
            identity_result("b", 0.0, 1.0, TOL)
        assert [r.name for r in collector.results] == ["a", "b"]
        assert collector.summary() == {'checks': 2, 'failed': 1, 'inconclusive': 0}

    def test_to_dict_handles_infinity(self):
        data = inequality_result("a", -math.inf, 0.0, TOL).to_dict()
        assert data['lhs'] == "-inf"
        assert data['passed'] is True


class TestErrors:
    """Exception hierarchy"""

    def test_assumption_message(self):
        error = AssumptionViolated("A1", pair=(0, 2), outcome=1, detail="gap 0.9")
        assert error.assumption == "A1"
        assert "predictors 0 and 2" in str(error)
        assert isinstance(error, ComplexityError)

    def test_index_out_of_range_is_index_error(self):
        assert issubclass(IndexOutOfRange, IndexError)


class _EchoCommand(Command):
    command_type = CommandType.COMP
    help = "echo"

    def configure(self, parser):
        parser.add_argument('--value', type=int, default=1)

    def run(self, args, context):
        return CommandOutcome({'value': args.value, 'context': context}, passed=args.value > 0)


class TestCommands:
    """Command registration, parsing and dispatch"""

    def test_dispatch(self):
        manager = CommandManager(prog="t")
        manager.register_command(_EchoCommand())
        args = manager.build_parser().parse_args(['comp', '--value', '3'])
        outcome = manager.dispatch(args, context="ctx")
        assert outcome.document == {'value': 3, 'context': "ctx"}
        assert outcome.passed

    def test_global_options(self):
        manager = CommandManager(configure_globals=lambda p: p.add_argument('--flag', action='store_true'))
        manager.register_command(_EchoCommand())
        args = manager.build_parser().parse_args(['--flag', 'comp'])
        assert args.flag

    def test_subcommand_required(self):
        manager = CommandManager()
        manager.register_command(_EchoCommand())
        with pytest.raises(SystemExit):
            manager.build_parser().parse_args([])

    def test_unregistered_command(self):
        manager = CommandManager()
        with pytest.raises(PreconditionFailed):
            manager.dispatch(argparse.Namespace(command='verify'), None)

    def test_command_without_type(self):
        class Untyped(_EchoCommand):
            command_type = None

        with pytest.raises(PreconditionFailed):
            CommandManager().register_command(Untyped())
