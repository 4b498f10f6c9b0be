"""
CLI Commands
The five subcommands and the helpers that turn flags into estimators,
luckiness functions and problems
"""

import argparse
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.commands import Command, CommandManager, CommandOutcome, CommandType
from src.core.config import setting, tolerance
from src.core.constants import HAUSSLER_BUDGET, LOSS_GAP_BOUND
from src.core.errors import MalformedSpec, PreconditionFailed
from src.core.results import CheckStatus, VerificationResult, inequality_result
from src.complexity.decomposition import exact_block_bounds, two_part_bound_check
from src.complexity.luckiness import LuckinessFunction
from src.complexity.shtarkov import (
    comp_full,
    comp_generalized,
    comp_luckiness,
    comp_max,
    maximum_likelihood,
    shtarkov_generalized,
    shtarkov_luckiness,
    shtarkov_simple,
)
from src.conditions.bernstein import (
    VFunction,
    fit_bernstein,
    kl_renyi_check,
    v_central_check,
)
from src.conditions.esi import esi_implications_check, theorem1_identity, theorem1_statement
from src.conditions.risk_bound import risk_bound_eval
from src.empirical.chain import (
    verify_lemma_sigma,
    verify_oht,
    verify_opper_haussler,
    verify_symmetrization,
    verify_talagrand_moment,
)
from src.empirical.haussler import extended_haussler_check
from src.entropify.model import entropify
from src.estimators.base import DeterministicEstimator, Estimator, PenaltyFunction, PriorOverClass, dirac
from src.estimators.bayes import generalized_bayes
from src.estimators.erm import erm, penalized_erm
from src.estimators.mdl import two_part_mdl
from src.estimators.selection import ValidationSplit, eta_grid_select
from src.harness.experiments import equalizer_experiment, model_select_experiment
from src.harness.generators import GeneratorFamily, GeneratorSpec
from src.harness.rates import RateEstimator, mean_excess_risk, rate_experiment
from src.harness.reports import result_rows
from src.measure.enumerator import SampleEnumerator
from src.measure.montecarlo import McConfig
from src.problem.builder import load_problem
from src.problem.partition import Partition, load_partition
from src.problem.types import LearningProblem

logger = logging.getLogger(__name__)

ESI_CHECKS = ('theorem1', 'esi', 'bernstein', 'vcentral', 'klrenyi', 'riskbound')
EMPIRICAL_CHECKS = ('oht', 'opperhaussler', 'talagrand', 'symmetrization', 'sigma', 'haussler')


@dataclass
class RunContext:
    """Settings shared by every command of one run"""
    problem_path: Optional[str] = None
    allow_unscaled: bool = False
    mc: Optional[McConfig] = None
    cap: Optional[int] = None

    def problem(self) -> LearningProblem:
        if not self.problem_path:
            raise MalformedSpec("this command needs --problem <file.json>")
        return load_problem(self.problem_path, allow_unscaled=self.allow_unscaled)


# Flag parsing

def _read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise MalformedSpec(f"{path}: {e}") from e


def _read_vector(path: str, key: str, size: int) -> np.ndarray:
    data = _read_json(path)
    if key not in data:
        raise MalformedSpec(f"{path}: missing '{key}'")
    values = np.asarray(data[key], dtype=float)
    if values.shape != (size,):
        raise MalformedSpec(f"{path}: '{key}' needs {size} entries, got {values.size}")
    return values


def parse_list(text: Optional[str], cast=float) -> Optional[List]:
    """'16,32,64' -> [16, 32, 64]"""
    if text is None:
        return None
    try:
        return [cast(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise MalformedSpec(f"bad list '{text}': {e}") from e


def load_prior(path: Optional[str], size: int) -> PriorOverClass:
    """{"masses": [...]} from a file, uniform without one"""
    if path is None:
        return PriorOverClass.uniform(size)
    return PriorOverClass(_read_vector(path, 'masses', size))


def load_penalty(path: Optional[str], size: int) -> PenaltyFunction:
    """{"gamma": [...]} from a file, zero without one"""
    if path is None:
        return PenaltyFunction.zero(size)
    return PenaltyFunction(_read_vector(path, 'gamma', size))


def build_estimator(problem: LearningProblem, name: str, prior: Optional[str] = None,
                    penalty: Optional[str] = None) -> Estimator:
    """erm | bayes | penalized | ml | dirac:<i>"""
    size = problem.n_predictors
    if name == 'erm':
        return erm(problem)
    if name == 'bayes':
        return generalized_bayes(problem, load_prior(prior, size))
    if name == 'penalized':
        return penalized_erm(problem, load_penalty(penalty, size))
    if name == 'ml':
        return maximum_likelihood(entropify(problem))
    if name.startswith('dirac:'):
        try:
            return dirac(problem, int(name.split(':', 1)[1]))
        except ValueError as e:
            raise MalformedSpec(f"bad estimator '{name}'") from e
    raise MalformedSpec(f"unknown estimator '{name}'")


def build_luckiness(problem: LearningProblem, spec: str, est: Estimator,
                    prior: Optional[str] = None) -> Optional[LuckinessFunction]:
    """const | prior-ratio | penalty:<file> | composite:<file>; None stands for w = 1"""
    kind, _, path = spec.partition(':')
    size = problem.n_predictors
    if kind == 'const':
        return None
    if kind == 'prior-ratio':
        return LuckinessFunction.prior_ratio(load_prior(prior, size), est)
    if kind == 'penalty' and path:
        if not isinstance(est, DeterministicEstimator):
            raise PreconditionFailed("penalty luckiness needs a deterministic estimator")
        return LuckinessFunction.penalty(load_penalty(path, size), est)
    if kind == 'composite' and path:
        data = _read_json(path)
        try:
            partition = Partition(tuple(tuple(b) for b in data['blocks']), size)
            pi_K = PriorOverClass(np.asarray(data['pi_K'], dtype=float))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedSpec(f"{path}: {e}") from e
        sub = [LuckinessFunction.constant(size)] * partition.size
        return LuckinessFunction.composite(partition, pi_K, sub, est)
    raise MalformedSpec(f"unknown luckiness '{spec}'")


def _add_estimator_options(parser: argparse.ArgumentParser):
    parser.add_argument('--estimator', default='erm',
                        help="erm | bayes | penalized | ml | dirac:<i> (default erm)")
    parser.add_argument('--luckiness', default='const',
                        help="const | prior-ratio | penalty:<file> | composite:<file>")
    parser.add_argument('--prior', help='JSON file {"masses": [...]} (default uniform)')
    parser.add_argument('--penalty', help='JSON file {"gamma": [...]} for penalized ERM')


def _estimator_and_luckiness(problem: LearningProblem, args: argparse.Namespace):
    est = build_estimator(problem, args.estimator, args.prior, args.penalty)
    return est, build_luckiness(problem, args.luckiness, est, args.prior)


def _verification_outcome(results: Sequence[VerificationResult], **extra) -> CommandOutcome:
    document = {'results': [r.to_dict() for r in results]}
    document.update(extra)
    return CommandOutcome(document, result_rows(results), all(r.status is not CheckStatus.FAIL for r in results))


# Commands

class CompCommand(Command):
    command_type = CommandType.COMP
    help = "compute a Shtarkov integral and its complexity"

    def configure(self, parser):
        _add_estimator_options(parser)
        parser.add_argument('--mode', default='simple',
                            choices=['simple', 'max', 'luckiness', 'generalized', 'full'])
        parser.add_argument('--sample', help="comma-separated outcome indices of one sample z^n")

    def run(self, args, context):
        problem = context.problem()
        model = entropify(problem)
        sample = parse_list(args.sample, int)
        if args.mode == 'max':
            report = comp_max(model, cap=context.cap)
            document = report.to_dict()
            return CommandOutcome(document, [document])

        est, w = _estimator_and_luckiness(problem, args)
        if args.mode == 'simple':
            report = shtarkov_simple(model, est, cfg=context.mc, cap=context.cap)
        elif args.mode == 'luckiness':
            w = w or LuckinessFunction.constant(problem.n_predictors)
            report = shtarkov_luckiness(model, est, w, cfg=context.mc, cap=context.cap)
        else:
            report = shtarkov_generalized(model, est, w, cfg=context.mc, cap=context.cap)

        document = report.to_dict()
        document['estimator'] = est.name
        document['luckiness'] = args.luckiness
        if sample is not None:
            document['sample'] = sample
            if args.mode == 'luckiness':
                document['sample_comp'] = comp_luckiness(model, est, w, sample, report)
            elif args.mode == 'generalized':
                document['sample_comp'] = comp_generalized(model, est, w, sample, report)
            elif args.mode == 'full':
                document['sample_comp'] = comp_full(model, est, w, sample, report)
        elif args.mode == 'full':
            raise MalformedSpec("--mode full needs --sample")
        return CommandOutcome(document, [document])


class VerifyCommand(Command):
    command_type = CommandType.VERIFY
    help = "certify identities and inequalities on a problem"

    def configure(self, parser):
        _add_estimator_options(parser)
        parser.add_argument('--check', default='all', choices=['all', *ESI_CHECKS, *EMPIRICAL_CHECKS],
                            help="'all' runs the ESI and Bernstein checks")
        parser.add_argument('--beta', type=float, default=0.0, help="Bernstein exponent for v (default 0)")
        parser.add_argument('--gamma', type=float, default=0.1, help="gamma for riskbound (default 0.1)")
        parser.add_argument('--gamma-grid', help="comma-separated gamma grid (default from config)")
        parser.add_argument('--epsilon', type=float, default=0.25, help="cover radius (default 0.25)")
        parser.add_argument('--cell', help="comma-separated predictor indices (default the whole class)")
        parser.add_argument('--f0', type=int, help="cell center (default the risk minimizer)")
        parser.add_argument('--budget', type=int, default=HAUSSLER_BUDGET, help="Haussler point-set budget")

    def run(self, args, context):
        problem = context.problem()
        checks = ESI_CHECKS if args.check == 'all' else (args.check,)
        results = []
        for check in checks:
            results.extend(self._run_check(check, problem, args, context))
        return _verification_outcome(results)

    def _run_check(self, check: str, problem: LearningProblem, args, context) -> List[VerificationResult]:
        model = entropify(problem)
        grid = parse_list(args.gamma_grid) or list(setting('harness.gamma_grid'))

        if check in ('theorem1', 'esi', 'riskbound'):
            est, w = _estimator_and_luckiness(problem, args)
            if check == 'theorem1':
                return [theorem1_identity(model, est, w, cfg=context.mc, cap=context.cap)]
            if check == 'esi':
                report = shtarkov_generalized(model, est, w, cap=context.cap)
                stmt = theorem1_statement(model, est, w, report)
                return [esi_implications_check(problem, stmt, cap=context.cap)]
            v = VFunction.from_bernstein(fit_bernstein(problem, args.beta))
            return [risk_bound_eval(model, est, w, args.gamma, v, cfg=context.mc, cap=context.cap).esi]

        if check == 'bernstein':
            fit = fit_bernstein(problem, 0.0)
            return [inequality_result("bernstein: B at beta=0", fit.B, LOSS_GAP_BOUND ** 2,
                                      tolerance('inequality'), vacuous=fit.vacuous)]
        if check in ('vcentral', 'klrenyi'):
            v = VFunction.from_bernstein(fit_bernstein(problem, args.beta))
            if check == 'vcentral':
                return [v_central_check(problem, v, grid)]
            results = []
            for gamma in grid:
                if not v_central_check(problem, v, [gamma]).passed:
                    logger.info("v-central fails at gamma=%g; kl-renyi skipped there", gamma)
                    continue
                results.extend(kl_renyi_check(problem, f, gamma, v) for f in range(problem.n_predictors))
            return results

        cell = parse_list(args.cell, int) or list(range(problem.n_predictors))
        f0 = problem.fstar_index if args.f0 is None else args.f0
        if f0 not in cell:
            f0 = cell[0]
        if check == 'oht':
            return [verify_oht(model, args.epsilon, cap=context.cap)]
        if check == 'opperhaussler':
            return [verify_opper_haussler(model, f0, cell, cap=context.cap)]
        if check == 'talagrand':
            return [verify_talagrand_moment(model, f0, cell, cap=context.cap)]
        if check == 'symmetrization':
            return [verify_symmetrization(model, f0, cell, cap=context.cap)]
        if check == 'sigma':
            return [verify_lemma_sigma(model)]
        return [extended_haussler_check(model, args.epsilon, sample_budget=args.budget, cfg=context.mc)]


def _generator_spec(args) -> GeneratorSpec:
    if args.spec:
        return GeneratorSpec.from_dict(_read_json(args.spec))
    return GeneratorSpec(GeneratorFamily(args.family), noise=args.noise, seed=args.generator_seed,
                         block_sizes=tuple(parse_list(args.block_sizes, int) or (1, 3)))


def _power_rule(exponent: float):
    def rule(n: int) -> float:
        return n ** -exponent
    return rule


def _add_generator_options(parser: argparse.ArgumentParser, family: str):
    parser.add_argument('--spec', help="generator spec JSON (overrides the flags below)")
    parser.add_argument('--family', default=family, choices=[f.value for f in GeneratorFamily])
    parser.add_argument('--noise', type=float, default=0.0, help="margin h (0 selects h_n = n^-1/2)")
    parser.add_argument('--block-sizes', help="comma-separated block sizes for nested_blocks")
    parser.add_argument('--generator-seed', type=int, default=0)
    parser.add_argument('--n-list', help="comma-separated sample sizes (default from config)")


class RatesCommand(Command):
    command_type = CommandType.RATES
    help = "fit the excess-risk slope of an estimator across sample sizes"

    def configure(self, parser):
        _add_generator_options(parser, GeneratorFamily.THRESHOLD_GRID.value)
        parser.add_argument('--rate-estimator', default='erm', choices=[k.value for k in RateEstimator])
        parser.add_argument('--gamma-exponent', type=float,
                            help="use gamma_n = n^-a in the reported bound (default best grid gamma)")

    def run(self, args, context):
        gamma_rule = None
        if args.gamma_exponent is not None:
            gamma_rule = _power_rule(args.gamma_exponent)
        report = rate_experiment(_generator_spec(args), RateEstimator(args.rate_estimator),
                                 parse_list(args.n_list, int), gamma_rule, cfg=context.mc, cap=context.cap)
        return CommandOutcome(report.to_dict(), report.rows(), report.passed)


class SelectCommand(Command):
    command_type = CommandType.SELECT
    help = "two-part MDL selection on a partitioned class"

    def configure(self, parser):
        _add_generator_options(parser, GeneratorFamily.NESTED_BLOCKS.value)
        parser.add_argument('--partition', help='JSON file {"blocks": [[...], ...]}')
        parser.add_argument('--block-prior', help='JSON file {"masses": [...]} over blocks (default uniform)')
        parser.add_argument('--comp-bounds', default='exact', help="exact | <file with {\"comp_bounds\": [...]}>")
        parser.add_argument('--eta', type=float, help="learning rate override")
        parser.add_argument('--eta-grid', help="comma-separated eta grid, chosen on held-out draws")
        parser.add_argument('--experiment', action='store_true',
                            help="run the generated-problem experiment against ERM")

    def run(self, args, context):
        if args.experiment:
            spec = _generator_spec(args)
            pi_K = load_prior(args.block_prior, len(spec.block_sizes))
            n_list = parse_list(args.n_list, int) or [1, 2, 3, 4]
            report = model_select_experiment(spec, pi_K, n_list, cfg=context.mc, cap=context.cap)
            return CommandOutcome(report.to_dict(), report.rows(), report.passed)

        problem = context.problem()
        if not args.partition:
            raise MalformedSpec("select needs --partition (or --experiment)")
        partition = load_partition(args.partition, problem.n_predictors)
        pi_K = load_prior(args.block_prior, partition.size)
        if args.eta is not None:
            problem = problem.with_eta(args.eta)

        def bounds_at(p: LearningProblem) -> np.ndarray:
            if args.comp_bounds == 'exact':
                return exact_block_bounds(entropify(p), partition, cap=context.cap)
            return _read_vector(args.comp_bounds, 'comp_bounds', partition.size)

        document: Dict[str, Any] = {}
        grid = parse_list(args.eta_grid)
        if grid:
            mc = context.mc or McConfig.from_config()
            split = ValidationSplit(problem.n, problem.n, trials=mc.trials, seed=mc.seed)

            def family(eta):
                p = problem.with_eta(eta)
                return two_part_mdl(p, partition, pi_K, bounds_at(p))

            selection = eta_grid_select(problem, family, grid, split)
            problem = problem.with_eta(selection.eta)
            document['eta_scores'] = {str(k): v for k, v in selection.scores.items()}

        bounds = bounds_at(problem)
        est = two_part_mdl(problem, partition, pi_K, bounds)
        bound = two_part_bound_check(entropify(problem), partition, pi_K, bounds, est, cap=context.cap)
        chunk = SampleEnumerator(problem, cap=context.cap).materialize()
        frequencies = np.bincount(est.select_block(chunk.samples), weights=np.exp(chunk.log_weight),
                                  minlength=partition.size)
        document.update({
            'eta': problem.eta,
            'comp_bounds': bounds.tolist(),
            'block_frequencies': frequencies.tolist(),
            'mean_excess_risk': mean_excess_risk(problem, est, context.mc, context.cap).value,
            'bound': bound.to_dict(),
        })
        return CommandOutcome(document, result_rows([bound]), bound.status is not CheckStatus.FAIL)


class EqualizerCommand(Command):
    command_type = CommandType.EQUALIZER
    help = "check that the luckiness-NML regret is constant"

    def configure(self, parser):
        _add_estimator_options(parser)

    def run(self, args, context):
        problem = context.problem()
        est, w = _estimator_and_luckiness(problem, args)
        report = equalizer_experiment(problem, est, w, cap=context.cap)
        return CommandOutcome(report.to_dict(), [report.to_dict()], report.passed)


def default_manager(configure_globals=None) -> CommandManager:
    """A manager with every subcommand registered"""
    manager = CommandManager(prog=Path('main.py').name,
                             description="Unified complexity toolkit for finite learning problems",
                             configure_globals=configure_globals)
    for command in (CompCommand(), VerifyCommand(), RatesCommand(), SelectCommand(), EqualizerCommand()):
        manager.register_command(command)
    return manager
