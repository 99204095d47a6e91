"""
Main program
"""
import argparse
import logging
import sys

from src import __version__
from src.app import FIGURES, run
from src.config import merge
from src.errors import AmplitudeSearchError, InternalInvariantError
from src.file_utils import load_json_config, write_results

logger = logging.getLogger('ampreduce')

EXIT_INVALID = 2
EXIT_INVARIANT = 3

LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def setup_cli(argv: list[str]) -> argparse.Namespace:
    """
    Setup CLI
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='JSON config file; flags override its fields')
    common.add_argument('--array', type=str,
                        help='Comma separated values or a generator (range:M, interleaved:M, fill:M:V, '
                             'distinct-zero:M)')
    common.add_argument('--bits', type=int, help='Bits per element (n)')
    common.add_argument('--m', type=int, help='Counter qubits; generates distinct-zero:2^m without --array')
    common.add_argument('--target', type=int, help='Target value B (default 0)')
    common.add_argument('--exclude', type=int, help='Value removed by filter mode')
    common.add_argument('--schedule', '--preset', dest='schedule', type=str,
                        help='default, highest-bit-pi, exact-match or pi multiples like 1/2,1/4; '
                             'separate per-iteration schedules with ;')
    common.add_argument('--signs', choices=['paper', 'doubling'], help='Sign pattern of the rotations')
    common.add_argument('--iterations', type=int, help='Reload iterations')
    common.add_argument('--cycles', type=int, help='Re-measurement or redistribution cycles')
    common.add_argument('--outlier', type=int, help='Outlier index reported by the decoherence run')
    common.add_argument('--shots', type=int, help='Number of shots (default 10000)')
    common.add_argument('--seed', type=int, help='Root seed of every sampled run')
    common.add_argument('--workers', type=int, help='Threads drawing shot blocks')
    common.add_argument('--out', type=str, help='Output directory (default results)')
    common.add_argument('--format', choices=['csv', 'json'], help='Output format (default csv)')
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')

    parser = argparse.ArgumentParser(description='Simulate oracle-free amplitude reduction search and filtering')
    parser.add_argument('--version', action='version', version=f'AmpReduce {__version__}')

    subparsers = parser.add_subparsers(dest='command', required=True)
    for command, description in (('search', 'Single-call nearest-value or exact-match search'),
                                 ('filter', 'Drive one value to probability zero'),
                                 ('iterate', 'Iterate the reload channel'),
                                 ('null-element', 'Exact match with the null-element buffer'),
                                 ('decoherence', 'Measure, re-rotate and measure again')):
        subparsers.add_parser(command, parents=[common], help=description)

    figure_parser = subparsers.add_parser('figure', parents=[common], help='Reproduce one figure')
    figure_parser.add_argument('figure', choices=list(FIGURES), help='Figure id')

    return parser.parse_args(argv)


def main(argv: list[str]) -> int:
    """
    Run one experiment and print the written paths
    :param argv: The command-line arguments
    :return: The exit code
    """
    args = setup_cli(argv)
    logging.basicConfig(level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
                        format='%(levelname)s %(name)s: %(message)s')

    overrides = vars(args).copy()
    for key in ('config', 'verbose'):
        del overrides[key]

    try:
        base = load_json_config(args.config) if args.config else {}
        config = merge(base, overrides)
        paths = write_results(run(config), config.out, config.format)
    except InternalInvariantError as error:
        logger.error('Internal invariant violated: %s', error)
        return EXIT_INVARIANT
    except AmplitudeSearchError as error:
        logger.error('%s', error)
        return EXIT_INVALID

    for path in paths:
        print(path)

    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
