"""
argparse front end: builds a RunConfig from the command line and runs it.
"""

import argparse
import logging
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from georisk.cli.config import COMMANDS, RunConfig, parse_list
from georisk.cli.report import write_json
from georisk.cli.runner import EXIT_INPUT_ERROR, run
from georisk.errors import ConfigurationError

logger = logging.getLogger(__name__)


def _weights(text: str) -> List[float]:
    try:
        return [float(w) for w in parse_list(text)]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"weights must be comma-separated numbers, got '{text}'") from e


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--scenarios', type=Path, help='Scenario CSV (outcome, p, d<k> densities, positions)')
    common.add_argument('--measure', type=Path, help='Measure spec JSON')
    common.add_argument('--seed', type=int, default=None, help='Sampling seed (required by classify, recover-r)')
    common.add_argument('--out', type=Path, default=None, help='Output file, .json or .csv (default: JSON on stdout)')
    common.add_argument('--samples', type=int, default=None, help='Override the number of sampled tuples')
    common.add_argument('--tolerance', type=float, default=None, help='Override the verdict tolerance')
    common.add_argument('--archive', type=Path, default=None, help='SQLite run archive')
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='georisk',
                                     description='Return risk measures: evaluation, taxonomy, duality, '
                                                 'portfolio choice and capital allocation')
    sub = parser.add_subparsers(dest='command', required=True, metavar='{' + ','.join(COMMANDS) + '}')
    common = _common_options()

    p = sub.add_parser('eval', parents=[common], help='Evaluate a measure on position columns')
    p.add_argument('--position', default=None, help='Position column (default: all)')

    sub.add_parser('classify', parents=[common], help='Sampled taxonomy and monetary/return bridges')

    p = sub.add_parser('recover-r', parents=[common], help='Recover R(t; Q) on a t grid')
    p.add_argument('--t-grid', required=True, help='lo:step:hi')
    p.add_argument('--scenario', type=int, default=0, help='Scenario index k (density column order)')

    p = sub.add_parser('frontier', parents=[common], help='Efficient frontier over an r grid')
    p.add_argument('--r-grid', required=True, help='lo:step:hi')
    p.add_argument('--assets', default=None, help='Comma-separated asset columns (default: all)')
    p.add_argument('--generalized', action='store_true', help='Log-constraint family in log-weights')

    p = sub.add_parser('allocate', parents=[common], help='Capital allocation to sub-units')
    p.add_argument('--units', required=True, help='Comma-separated unit columns')
    p.add_argument('--total', required=True, help='Total position column')
    p.add_argument('--rule', default='subdifferential', help='acceptance, subdifferential or proportional')
    p.add_argument('--composition', default='ratio', help='ratio, additive or multiplicative')

    p = sub.add_parser('simulate', parents=[common], help='Buy-and-hold and rebalanced wealth paths')
    p.add_argument('--w', dest='weights', type=_weights, required=True, help='Weights W1,...')
    p.add_argument('--steps', type=int, default=1, help='Rebalancing steps per period')
    p.add_argument('--assets', default=None, help='Comma-separated asset columns (default: all)')

    sub.add_parser('counterexamples', parents=[common], help='QLC-but-not-QC instances')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {
        'command': args.command,
        'scenarios_path': args.scenarios,
        'measure_spec_path': args.measure,
        'seed': args.seed,
        'output': args.out,
        'samples': args.samples,
        'tolerance': args.tolerance,
        'archive': args.archive,
    }
    for name in ('position', 't_grid', 'r_grid', 'generalized', 'scenario', 'total', 'rule', 'composition',
                 'steps', 'weights'):
        if hasattr(args, name):
            values[name] = getattr(args, name)
    for name in ('assets', 'units'):
        if getattr(args, name, None) is not None:
            values[name] = parse_list(getattr(args, name))
    return RunConfig(**values)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, validate and run; returns the process exit code"""
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ValidationError, ConfigurationError) as e:
        logger.error(f"✗ Invalid configuration: {e}")
        if args.out is not None and args.out.suffix == '.json':
            write_json({'command': args.command, 'exit_code': EXIT_INPUT_ERROR,
                        'error': {'type': type(e).__name__, 'message': str(e), 'row': None, 'column': None}},
                       args.out)
        return EXIT_INPUT_ERROR
    return run(config)
