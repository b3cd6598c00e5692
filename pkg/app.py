#  app.py
import argparse
import sys

from config.experiment_kinds import ExperimentKind
from src import __version__
from src.core.error_handler import ConfigError, LabError
from src.core.logger import get_logger
from src.core.settings import CONFIG_DIR
from src.harness.calibration import calibrate
from src.harness.experiment_config import load_experiment_config
from src.harness.report import Report
from src.harness.runner import run

logger = get_logger(__name__)

EXPERIMENTS_DIR = CONFIG_DIR / 'experiments'

# subcommand -> experiment kind of its config
SHORTCUTS = {
    'maximal': ExperimentKind.MAXIMAL_ESTIMATE,
    'verify-decomposition': ExperimentKind.VERIFY_DECOMPOSITION,
    'check-deviation': ExperimentKind.CHECK_DEVIATION,
    'check-lemmas': ExperimentKind.CHECK_ORLICZ_LEMMAS,
    'series': ExperimentKind.SERIES,
    'dyadic-ratio': ExperimentKind.DYADIC_RATIO,
}

def _add_run_flags(parser: argparse.ArgumentParser, config_required: bool):
    parser.add_argument('--config', required=config_required, help='Experiment YAML file')
    parser.add_argument('--seed', type=int, help='Override the master seed')
    parser.add_argument('--threads', type=int, help='Worker threads (results do not depend on it)')
    parser.add_argument('--out', help='Report path')
    parser.add_argument('--format', choices=('csv', 'json'), help='Report format')

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='lil-field-lab',
                                     description='Bounded LIL random-field verification lab')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='command', required=True)

    _add_run_flags(subparsers.add_parser('run', help='Run any experiment config'), True)
    for name, kind in SHORTCUTS.items():
        sub = subparsers.add_parser(name, help=f"Run a {kind.value} experiment "
                                               f"(default config: config/experiments/{kind.value}.yaml)")
        _add_run_flags(sub, False)

    report = subparsers.add_parser('report', help='Summarize a JSON report')
    report.add_argument('path', help='Report written with --format json')
    report.add_argument('--csv', help='Also re-export the records to this CSV file')

    cal = subparsers.add_parser('calibrate', help='Regenerate config/calibration.yaml from pilot runs')
    cal.add_argument('--seed', type=int, help='Pilot seed')
    cal.add_argument('--replications', type=int, help='Pilot replications')
    cal.add_argument('--threads', type=int, help='Worker threads')
    return parser

def _run_experiment(args) -> int:
    kind = SHORTCUTS.get(args.command)
    path = args.config or EXPERIMENTS_DIR / f"{kind.value}.yaml"
    config = load_experiment_config(path)
    if kind is not None and config.kind != kind:
        raise ConfigError(f"'{args.command}' expects a {kind.value} config, got {config.kind.value}", 'experiment')
    config = config.with_overrides(args.seed, args.threads, args.out, args.format)
    report = run(config)
    print(report.summary())
    return report.exit_code

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == 'report':
            report = Report.from_json(args.path)
            if args.csv:
                report.write(args.csv, 'csv')
            print(report.summary())
            return report.exit_code
        if args.command == 'calibrate':
            calibrate(seed=args.seed, replications=args.replications, threads=args.threads)
            return 0
        return _run_experiment(args)
    except ConfigError as e:
        sys.stderr.write(f"config error: {e}\n")
        return 2
    except LabError as e:
        logger.error(f"{args.command} aborted: {e}")
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return 1

if __name__ == '__main__':
    sys.exit(main())
