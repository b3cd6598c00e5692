"""
Dispatch of validated experiment configs to the experiment kinds.
"""

import time
from typing import Callable, Dict

from config.experiment_kinds import DecompositionVariant, ExperimentKind, ZBlockVariant
from src.core.error_handler import ConfigError, log_method_call
from src.core.logger import get_logger
from src.core.settings import load_calibration
from src.harness import experiments
from src.harness.experiment_config import ExperimentConfig
from src.harness.report import Report
from src.lattice.geometry import powers_of_two

logger = get_logger(__name__)

def _schedule(config: ExperimentConfig):
    start = config.options.get('schedule_start') or config.window
    if any(s > w for s, w in zip(start, config.window)):
        raise ConfigError(f"schedule start {start} exceeds window {config.window}", 'options.schedule_start')
    return experiments.window_schedule(start, config.window)

def _model(config: ExperimentConfig):
    """First built model; random coefficient sets are only pooled by verify-decomposition."""
    return config.model.build(config.seed)[0]

def _maximal(config: ExperimentConfig, report: Report) -> Report:
    options = config.options
    return experiments.estimate_maximal_norms(
        _model(config), _schedule(config), config.p, config.r, config.replications, config.seed,
        threads=config.threads,
        orlicz=bool(options['orlicz']),
        z_variant=ZBlockVariant(options['z_variant']),
        calibration=load_calibration(),
        report=report,
    )

def _decomposition(config: ExperimentConfig, report: Report) -> Report:
    options = config.options
    return experiments.verify_decomposition(
        config.model.build(config.seed), config.window, config.replications, config.seed,
        variants=[DecompositionVariant(v) for v in options['variants']],
        threads=config.threads,
        listed_dim1=bool(options['listed_dim1']),
        report=report,
    )

def _deviation(config: ExperimentConfig, report: Report) -> Report:
    options = config.options
    for law in options['laws']:
        experiments.check_deviation_inequality(
            options['n'], law, options['x'], options['y'], config.replications, config.seed,
            threads=config.threads,
            exact_limit=options['exact_limit'],
            report=report,
        )
    return report

def _lemmas(config: ExperimentConfig, report: Report) -> Report:
    return experiments.check_orlicz_lemmas(seed=config.seed, report=report, **config.options)

def _series(config: ExperimentConfig, report: Report) -> Report:
    n_max = config.options['n_max'] or powers_of_two(config.window)
    return experiments.series_experiment(_model(config), n_max, config.seed,
                                         monte_carlo=bool(config.options['monte_carlo']), report=report)

def _dyadic(config: ExperimentConfig, report: Report) -> Report:
    return experiments.dyadic_ratio_experiment(
        _model(config), _schedule(config), config.replications, config.seed,
        threads=config.threads,
        calibration=load_calibration(),
        report=report,
    )

DISPATCH: Dict[ExperimentKind, Callable[[ExperimentConfig, Report], Report]] = {
    ExperimentKind.MAXIMAL_ESTIMATE: _maximal,
    ExperimentKind.VERIFY_DECOMPOSITION: _decomposition,
    ExperimentKind.CHECK_DEVIATION: _deviation,
    ExperimentKind.CHECK_ORLICZ_LEMMAS: _lemmas,
    ExperimentKind.SERIES: _series,
    ExperimentKind.DYADIC_RATIO: _dyadic,
}

@log_method_call()
def run(config: ExperimentConfig) -> Report:
    """
    Run one experiment and write its report when an output path is configured.

    Returns:
        Report: Records and verdicts; report.exit_code is 0 when every
            binding verdict passed
    """
    logger.info(f"Running {config.kind.value} (d={config.d}, seed={config.seed}, "
                f"replications={config.replications})")
    report = Report(config.kind.value, config.d, config.seed, config.echo())
    started = time.perf_counter()
    DISPATCH[config.kind](config, report)
    report.wall_clock = time.perf_counter() - started

    if config.output is not None:
        report.write(config.output, config.format)
    outcome = 'passed' if report.passed else 'failed'
    logger.info(f"{config.kind.value} {outcome}: {len(report.verdicts)} binding verdicts, "
                f"{len(report.records)} records")
    return report
