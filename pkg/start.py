import argparse
import datetime
import json
import logging
import os
import signal
import sys
import traceback

from src.runner.batch import batch
from src.runner.config_reader import ConfigReaderFactory
from src.runner.experiment import emit_matrix, run_experiment, scale
from src.runner.experiment_config import ConfigError
from src.utils.tools import Tools
from utils.logger_utils import child_logger, setup_logger

EXIT_COMPLETED = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

falsifier_logger = None


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; usage errors here are exit code 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> CliParser:
    parser = CliParser(description='Falsify oscillation properties of parametric ODE models.')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', required=False, help='Output directory, overrides the config', default=None)
    common.add_argument('--log-dir', required=False, help='The directory to store logs', default=None)
    common.add_argument('--disable-log-file', required=False, help='Disable logging to a file', default=False, action='store_true')
    common.add_argument('-v', '--verbose', required=False, help='Log debug messages to the console', default=False, action='store_true')

    commands = parser.add_subparsers(dest='command', required=True, parser_class=CliParser)
    run = commands.add_parser('run', parents=[common], help='Run one guided exploration')
    run.add_argument('experiment', help='Preset name (exp1, exp2, exp3, abstraction) or JSON config path')
    run.add_argument('--seed', type=int, required=False, help='Seed of the exploration', default=None)
    run.add_argument('--points', type=int, required=False, help='Number of exploration iterations', default=None)

    matrix = commands.add_parser('matrix', parents=[common], help='Write the abstraction and its walk matrix')
    matrix.add_argument('experiment', help='Preset name or JSON config path')

    sweep = commands.add_parser('batch', parents=[common], help='Run one exploration per seed')
    sweep.add_argument('experiment', help='Preset name or JSON config path')
    sweep.add_argument('--seeds', required=True, help='Comma-separated seeds, e.g. 0,1,2')
    sweep.add_argument('--workers', type=int, required=False, help='Worker processes', default=1)
    sweep.add_argument('--points', type=int, required=False, help='Number of exploration iterations', default=None)

    timing = commands.add_parser('scale', parents=[common], help='Time explorations at several point budgets')
    timing.add_argument('experiment', help='Preset name or JSON config path')
    timing.add_argument('--points', required=False, help='Comma-separated point budgets', default='10000,25000,50000')
    timing.add_argument('--seed', type=int, required=False, help='Seed of the explorations', default=None)
    return parser


def check_args(args):
    if args.disable_log_file and args.log_dir:
        raise UsageError("Cannot use both --disable-log-file and --log-dir")
    if getattr(args, 'points', None) is not None and isinstance(args.points, int) and args.points < 1:
        raise UsageError("--points must be at least 1")
    if args.command == 'batch' and args.workers < 1:
        raise UsageError("--workers must be at least 1")


def load_config(args):
    config = ConfigReaderFactory().read(args.experiment)
    if getattr(args, 'seed', None) is not None:
        config = config.with_seed(args.seed)
    if isinstance(getattr(args, 'points', None), int):
        config = config.with_points(args.points)
    if args.out:
        config = config.with_output(args.out)
    return config


def parse_list(text: str, option: str) -> list[int]:
    try:
        return Tools.parse_int_list(text)
    except ValueError as e:
        raise UsageError(f"{option}: {e}") from e


def execute(args) -> int:
    logger = child_logger(falsifier_logger, args.command)
    config = load_config(args)
    logger.debug(f"Configuration: {json.dumps(config.to_dict())}")
    if args.command == 'run':
        report = run_experiment(config, logger)
        verdict = report.verdict
        logger.info(f"Verdict: {verdict.kind.value}"
                              + (f" at t={verdict.witness_time:g}, exit value {verdict.exit_value:g}" if report.falsified() else ''))
    elif args.command == 'matrix':
        experiment = emit_matrix(config, logger)
        logger.info(f"Wrote {experiment.system.size()}x{experiment.system.size()} matrix to {config.output.directory}")
    elif args.command == 'batch':
        summary = batch(config, parse_list(args.seeds, "--seeds"), args.workers, logger)
        logger.info(f"Falsified {sum(1 for r in summary.completed() if r.falsified)} of "
                              f"{len(summary.completed())} completed seeds; timing {summary.timing()}")
    else:
        rows = scale(config, parse_list(args.points, "--points"), logger)
        out = Tools.ensure_directory(config.output.directory)
        Tools.write_json(os.path.join(out, 'scale.json'), rows)
        for row in rows:
            logger.info(f"{row['points']:>8} points  {row['seconds']:8.2f} s  ratio {row['ratio']}")
    return EXIT_COMPLETED


def main(argv=None) -> int:
    global falsifier_logger
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        check_args(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    log_dir = None
    if not args.disable_log_file:
        log_dir = os.path.join(args.log_dir or os.path.join(os.getcwd(), 'logs'),
                               datetime.datetime.now().strftime('%Y-%m-%d_%H-%M-%S'))
    falsifier_logger = setup_logger('falsifier', log_dir,
                                    console_level=logging.DEBUG if args.verbose else logging.INFO,
                                    file_level=logging.DEBUG if not args.disable_log_file else None,
                                    console_format_str='%(message)s')
    falsifier_logger.debug(f"Arguments: {args=}")

    def signal_handler(sig, frame):
        raise KeyboardInterrupt

    signal.signal(signal.SIGTERM, signal_handler)
    signal.signal(signal.SIGINT, signal_handler)

    try:
        return execute(args)
    except (ConfigError, UsageError) as e:
        falsifier_logger.error(f"Configuration error: {e}")
        falsifier_logger.debug(traceback.format_exc())
        return EXIT_USAGE
    except KeyboardInterrupt:
        falsifier_logger.info('Received signal to terminate.')
        return EXIT_RUNTIME
    except Exception as e:
        falsifier_logger.error(f"Run failed: {e}")
        falsifier_logger.error(traceback.format_exc())
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
