"""
Complexity Toolkit - Main Entry Point
Computes Shtarkov/NML, luckiness and information complexities of finite
learning problems and certifies the bounds that connect them

To run: python main.py <comp|verify|rates|select|equalizer> [options]
"""

import argparse
import logging
import sys
from typing import List, Optional, TextIO

from src.core.config import Config, get_config, set_config
from src.core.errors import ComplexityError
from src.harness.cli import RunContext, default_manager
from src.harness.reports import ResultCollector, write_report
from src.measure.montecarlo import McConfig

logger = logging.getLogger("main")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def configure_globals(parser: argparse.ArgumentParser):
    """Options shared by every subcommand"""
    parser.add_argument('--problem', help="problem document (JSON)")
    parser.add_argument('--seed', type=int, help="Monte Carlo seed")
    parser.add_argument('--exact-cap', type=int, help="largest |Z|^n enumerated exactly")
    parser.add_argument('--mc-trials', type=int, help="Monte Carlo draws")
    parser.add_argument('--out', choices=['json', 'csv'], default='json')
    parser.add_argument('--allow-unscaled', action='store_true',
                        help="rescale losses that violate the 1/2 gap bound instead of rejecting them")
    parser.add_argument('--config-dir', help="directory holding settings.json")
    parser.add_argument('--verbose', '-v', action='store_true')


class Toolkit:
    """
    One CLI invocation
    Parses arguments, applies config overrides, dispatches and reports
    """

    def __init__(self, argv: Optional[List[str]] = None, stream: Optional[TextIO] = None):
        self.manager = default_manager(configure_globals)
        self.args = self.manager.build_parser().parse_args(argv)
        self.stream = stream or sys.stdout

        logging.basicConfig(level=logging.DEBUG if self.args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", force=True)

        if self.args.config_dir:
            config = Config(self.args.config_dir)
            config.load('settings')
            set_config(config)
        config = get_config()
        # Flags override the settings document for this run only
        overrides = {'engine.seed': self.args.seed, 'engine.exact_cap': self.args.exact_cap,
                     'engine.mc_trials': self.args.mc_trials}
        for key, value in overrides.items():
            if value is not None:
                config.set('settings', key, value)

        self.context = RunContext(problem_path=self.args.problem, allow_unscaled=self.args.allow_unscaled,
                                  mc=McConfig.from_config(),
                                  cap=int(config.get('settings', 'engine.exact_cap')))

    def run(self) -> int:
        """Exit code: 0 all checks pass, 1 a check failed, 2 usage or problem error"""
        try:
            with ResultCollector() as collector:
                outcome = self.manager.dispatch(self.args, self.context)
        except ComplexityError as e:
            logger.error("%s: %s", type(e).__name__, e)
            return EXIT_ERROR

        summary = collector.summary()
        if isinstance(outcome.document, dict):
            outcome.document.setdefault('summary', summary)
        write_report(outcome.document, outcome.rows, self.args.out, self.stream)
        logger.info("%d checks, %d failed, %d inconclusive",
                    summary['checks'], summary['failed'], summary['inconclusive'])
        if not outcome.passed or collector.failed:
            return EXIT_CHECK_FAILED
        return EXIT_OK


def run_cli(argv: Optional[List[str]] = None, stream: Optional[TextIO] = None) -> int:
    try:
        return Toolkit(argv, stream).run()
    except ComplexityError as e:
        logging.getLogger("main").error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR


def main():
    """Entry point for the toolkit"""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
