import hashlib
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.model.domain import RobotConfiguration, sample_positions
from src.model.enums import StrategyKind
from src.model.experiment_config import ExperimentConfig
from src.model.simulation_record import SimulationRecord
from src.service.search_service import SearchService, StrategySpec


def case_label(n: int, r: Optional[float], u: float) -> str:
    """
    The N.R.100U label used to name a parameter point, eg. 20.4.50 for N=20, R=4, U=0.5.
    An unlimited range is written as 'inf'.
    """
    return f"{n}.{'inf' if r is None else format(r, 'g')}.{format(100.0 * u, 'g')}"


def derive_seed(*parts) -> int:
    """
    A stable 64 bit seed from the given parts, independent of the process and of the scheduling order
    """
    digest = hashlib.sha256('|'.join(str(p) for p in parts).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')


@dataclass(frozen=True)
class SweepCell:
    """
    One point of the sweep grid: a strategy at (N, R, U) for one seed
    """
    strategy: StrategyKind
    n: int
    r: Optional[float]
    u: float
    seed: int

    @property
    def label(self) -> str:
        return case_label(self.n, self.r, self.u)

    @property
    def stem(self) -> str:
        return f"{self.label}_{self.strategy.name}_seed{self.seed}"


@dataclass(frozen=True)
class CellResult:
    cell: SweepCell
    record: Optional[SimulationRecord] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.record is None


@dataclass(frozen=True)
class SweepResult:
    results: Tuple[CellResult, ...]

    @property
    def records(self) -> List[SimulationRecord]:
        return [r.record for r in self.results if not r.failed]

    def summary_rows(self) -> List[Dict[str, object]]:
        """
        One row per cell; failed cells keep their identity and leave the counts empty
        """
        rows = []
        for result in self.results:
            cell, record = result.cell, result.record
            row = {'case_label': cell.label, 'strategy': cell.strategy.name, 'seed': cell.seed,
                   'steps': '', 'searches': '', 'elapsed_equivalent': '', 'terminated_by': 'failed'}
            if record is not None:
                sds = cell.strategy is StrategyKind.SDS
                row.update(steps=record.steps_elapsed, searches=record.searches_performed,
                           elapsed_equivalent=record.steps_elapsed if sds else record.searches_performed,
                           terminated_by=record.terminated_by.value)
            rows.append(row)
        return rows

    def aggregate_rows(self) -> List[Dict[str, object]]:
        """
        Per (case, strategy): run counts, median/min/max of steps, median searches and mean trajectory length
        """
        groups: Dict[Tuple[str, str], List[CellResult]] = {}
        for result in self.results:
            groups.setdefault((result.cell.label, result.cell.strategy.name), []).append(result)

        rows = []
        for (label, strategy), results in groups.items():
            done = [r.record for r in results if not r.failed]
            row = {'case_label': label, 'strategy': strategy, 'runs': len(results),
                   'failed': len(results) - len(done), 'steps_median': '', 'steps_min': '', 'steps_max': '',
                   'searches_median': '', 'mean_path_length': ''}
            if done:
                steps = np.array([r.steps_elapsed for r in done], dtype=float)
                row.update(steps_median=float(np.median(steps)), steps_min=int(steps.min()),
                           steps_max=int(steps.max()),
                           searches_median=float(np.median([r.searches_performed for r in done])),
                           mean_path_length=float(np.mean([r.mean_path_length for r in done])))
            rows.append(row)
        return rows


def sweep_cells(config: ExperimentConfig) -> List[SweepCell]:
    """
    The cartesian product strategy x N x R x U x seed, in declaration order
    """
    return [SweepCell(kind, n, r, u, seed) for kind, n, r, u, seed in
            itertools.product(config.strategies, config.n_robots, config.ranges, config.speeds, config.seeds)]


def run_cell(config: ExperimentConfig, cell: SweepCell) -> CellResult:
    """
    Run one sweep cell. Errors are caught and reported in the result so the sweep can go on.
    Initial positions only depend on (seed, N) so all strategies and (R, U) points of a seed start alike;
    the random heading stream also depends on the strategy and (R, U).
    """
    log = logging.getLogger(__name__)
    try:
        domain = config.domain()
        positions = sample_positions(domain, cell.n, np.random.default_rng(derive_seed('placement', cell.seed, cell.n)))
        robots = RobotConfiguration(positions, speed=cell.u, max_speed=config.max_speed)
        spec = StrategySpec(kind=cell.strategy, epsilon=config.epsilon, max_steps=config.max_steps,
                            rng_seed=derive_seed(cell.seed, cell.strategy.value, cell.n, cell.r, cell.u),
                            cds_law=config.cds_law, sds_law=config.sds_law)
        record = SearchService().run(domain, robots, config.sensor(cell.r), config.control_params(), spec,
                                     config.density.build(domain))
        return CellResult(cell, record=record)
    except Exception as e:
        log.error(f"Sweep cell {cell.stem} failed: {e}", exc_info=True)
        return CellResult(cell, error=str(e))


class SweepService:
    """
    Runs the (strategy x seed x N x R x U) grid of an experiment.
    Cells are independent; with more than one worker they run in separate processes. Each result is handed to
    the on_result callback as soon as its cell completes, and the returned results are in grid order so the
    summaries do not depend on scheduling.
    """

    def __init__(self, workers: int = 1):
        self._log = logging.getLogger(__name__)
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.workers = workers

    def run_sweep(self, config: ExperimentConfig,
                  on_result: Optional[Callable[[CellResult], None]] = None) -> SweepResult:
        """
        Run every cell of the sweep grid
        :param config: The validated experiment configuration
        :param on_result: Called in this process with every cell result as it completes
        :return: The per cell results in grid order, failed cells included
        """
        cells = sweep_cells(config)
        self._log.info(f"Running sweep of {len(cells)} cells with {self.workers} worker(s)")
        results: List[Optional[CellResult]] = [None] * len(cells)
        if self.workers == 1:
            for index, cell in enumerate(cells):
                results[index] = self._collect(run_cell(config, cell), on_result)
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                futures = {executor.submit(run_cell, config, cell): index for index, cell in enumerate(cells)}
                for future in as_completed(futures):
                    results[futures[future]] = self._collect(future.result(), on_result)

        failed = sum(1 for r in results if r.failed)
        if failed:
            self._log.warning(f"{failed} of {len(cells)} sweep cells failed")
        return SweepResult(tuple(results))

    def _collect(self, result: CellResult, on_result: Optional[Callable[[CellResult], None]]) -> CellResult:
        self._log.debug(f"Sweep cell {result.cell.stem} done")
        if on_result is not None:
            on_result(result)
        return result
