import logging
from os import environ
from pathlib import Path
from typing import Optional

import click
from concurrent_log_handler import ConcurrentRotatingFileHandler
from dotenv import load_dotenv

from src.logger_formatter import CustomFormatter
from src.model.enums import StrategyKind
from src.model.errors import ConfigParseError, ConfigValidationError, InvalidCombinationError
from src.service.config_service import load_config
from src.service.output_service import OutputService
from src.service.sweep_service import SweepCell, SweepResult, SweepService, run_cell

"""
This is the main entry point for the application.

Run a single simulation with `python -m src.app run --config <path>`,
or a full parameter sweep with `python -m src.app sweep --config <path>`.
Exit codes: 0 on success, 1 on an invalid configuration, 2 on a runtime error.
"""

EXIT_INVALID_CONFIG: int = 1
EXIT_RUNTIME_ERROR: int = 2


def setup_logging() -> None:
    """
    Configure the root logger from the environment (APP_DEBUG, APP_LOG_FILE)
    :return: None
    """
    handlers = []
    logfile = environ.get('APP_LOG_FILE', None)
    if logfile:
        fh = ConcurrentRotatingFileHandler(logfile, maxBytes=100000, backupCount=1)  # sweep workers share this file
        fh.setFormatter(logging.Formatter('[%(asctime)s] %(levelname)s in %(module)s: %(message)s'))
        handlers.append(fh)

    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(CustomFormatter())
    handlers.append(stream_handler)

    debug = environ.get('APP_DEBUG', "false").lower() == "true"
    logging.basicConfig(level=logging.DEBUG if debug else logging.INFO,
                        format='[%(asctime)s] %(levelname)s in %(module)s: %(message)s',
                        datefmt='%Y-%m-%d %H:%M:%S',
                        handlers=handlers,
                        force=True)
    logging.debug("Debug mode enabled")


def _load(config_path: Path, out: Optional[Path]):
    """
    Load the experiment document, exiting with EXIT_INVALID_CONFIG when it is unusable
    """
    try:
        config = load_config(config_path)
    except (ConfigParseError, ConfigValidationError) as e:
        logging.error(f"Invalid configuration {config_path}: {e}")
        raise SystemExit(EXIT_INVALID_CONFIG)
    except OSError as e:
        logging.error(f"Could not read configuration {config_path}: {e}")
        raise SystemExit(EXIT_INVALID_CONFIG)
    return config, (out if out is not None else config.out_dir)


def _emit(sweep: SweepResult, out_dir: Path) -> None:
    try:
        OutputService(out_dir).emit_outputs(sweep)
    except Exception:
        logging.exception(f"Could not write outputs to {out_dir}")
        raise SystemExit(EXIT_RUNTIME_ERROR)


@click.group()
def cli():
    """
    Multi-robot deploy and search simulations
    """
    load_dotenv(".env")
    setup_logging()


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False, path_type=Path),
              help='Experiment document')
@click.option('--out', type=click.Path(file_okay=False, path_type=Path), default=None,
              help='Output directory (overrides [output] dir)')
@click.option('--seed', type=int, default=None, help='Seed to use instead of the first configured one')
@click.option('--strategy', type=str, default=None, help='Strategy to use instead of the first configured one')
def run(config_path: Path, out: Optional[Path], seed: Optional[int], strategy: Optional[str]):
    """
    Run a single simulation: the first configured N, R, U, seed and strategy unless overridden
    """
    config, out_dir = _load(config_path, out)
    try:
        kind = StrategyKind.parse(strategy) if strategy is not None else config.strategies[0]
        if seed is not None and seed < 0:
            raise ConfigValidationError('seed', 'seed >= 0', seed)
        cell = SweepCell(kind, config.n_robots[0], config.ranges[0], config.speeds[0],
                         seed if seed is not None else config.seeds[0])
        if kind.requires_range() and cell.r is None:
            raise InvalidCombinationError(f"{kind.name} needs a sensor range limit")
    except ValueError as e:
        logging.error(f"Invalid run request: {e}")
        raise SystemExit(EXIT_INVALID_CONFIG)

    result = run_cell(config, cell)
    if result.failed:
        logging.error(f"Run {cell.stem} failed: {result.error}")
        raise SystemExit(EXIT_RUNTIME_ERROR)
    _emit(SweepResult((result,)), out_dir)
    click.echo(f"{cell.stem}: {result.record.steps_elapsed} steps, {result.record.searches_performed} searches, "
               f"terminated by {result.record.terminated_by.value}")


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False, path_type=Path),
              help='Experiment document')
@click.option('--out', type=click.Path(file_okay=False, path_type=Path), default=None,
              help='Output directory (overrides [output] dir)')
def sweep(config_path: Path, out: Optional[Path]):
    """
    Run every (strategy, N, R, U, seed) combination of the experiment
    """
    config, out_dir = _load(config_path, out)
    output = OutputService(out_dir)
    try:
        workers = int(environ.get('APP_SWEEP_WORKERS', '1'))
        # cell files are written as each cell completes, the summaries once all are done
        result = SweepService(workers).run_sweep(config, on_result=output.emit_cell)
        output.emit_summaries(result)
    except Exception:
        logging.exception("Sweep failed")
        raise SystemExit(EXIT_RUNTIME_ERROR)
    failed = len(result.results) - len(result.records)
    click.echo(f"{len(result.results)} cells run, {failed} failed, outputs in {out_dir}")


if __name__ == "__main__":
    cli()
