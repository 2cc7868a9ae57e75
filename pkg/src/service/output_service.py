import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence

from src.model.errors import OutputError
from src.model.simulation_record import SimulationRecord
from src.service.sweep_service import CellResult, SweepResult

TRAJECTORY_HEADER = ('step', 'robot', 'x', 'y')
HISTORY_HEADER = ('step', 'avg_uncertainty', 'searches_cumulative')
SUMMARY_HEADER = ('case_label', 'strategy', 'seed', 'steps', 'searches', 'elapsed_equivalent', 'terminated_by')
AGGREGATE_HEADER = ('case_label', 'strategy', 'runs', 'failed', 'steps_median', 'steps_min', 'steps_max',
                    'searches_median', 'mean_path_length')


def format_value(value) -> str:
    """
    Stable text for a CSV field. Floats get 9 significant digits, in lowercase scientific notation
    only below 1e-4 or from 1e9 on.
    """
    if isinstance(value, float):
        return format(value, '.9g')
    return str(value)


class OutputService:
    """
    Writes run records as CSV files (UTF-8, LF line endings). Output only depends on the records,
    so re-running an identical experiment reproduces the files byte for byte.
    """

    def __init__(self, out_dir: Path):
        self._log = logging.getLogger(__name__)
        self.out_dir = Path(out_dir)

    def _write(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        path = self.out_dir / name
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='') as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_value(v) for v in row])
        except OSError as e:
            raise OutputError(f"Could not write {path}: {e}") from e
        self._log.debug(f"Wrote {path}")
        return path

    def write_trajectory(self, record: SimulationRecord, stem: str) -> Path:
        """
        One row per robot per step, positions after the step
        """
        rows = ((step, robot, float(x), float(y))
                for step, positions in enumerate(record.positions, start=1)
                for robot, (x, y) in enumerate(positions))
        return self._write(f"{stem}_trajectory.csv", TRAJECTORY_HEADER, rows)

    def write_history(self, record: SimulationRecord, stem: str) -> Path:
        rows = ((step, avg, searches) for step, (avg, searches)
                in enumerate(zip(record.avg_uncertainty, record.searches_cumulative)))
        return self._write(f"{stem}_history.csv", HISTORY_HEADER, rows)

    def emit_cell(self, result: CellResult) -> List[Path]:
        """
        Write the trajectory and history files of one finished cell. Failed cells have none.
        :raise OutputError: when a file cannot be written
        """
        if result.failed:
            return []
        return [self.write_trajectory(result.record, result.cell.stem),
                self.write_history(result.record, result.cell.stem)]

    def emit_summaries(self, sweep: SweepResult) -> List[Path]:
        """
        Write the per cell summary and the aggregate summary of a finished sweep
        :raise OutputError: when a file cannot be written
        """
        paths = [self._write('summary.csv', SUMMARY_HEADER,
                             ([row[k] for k in SUMMARY_HEADER] for row in sweep.summary_rows())),
                 self._write('summary_aggregate.csv', AGGREGATE_HEADER,
                             ([row[k] for k in AGGREGATE_HEADER] for row in sweep.aggregate_rows()))]
        self._log.info(f"Wrote summaries of {len(sweep.results)} cells to {self.out_dir}")
        return paths

    def emit_outputs(self, sweep: SweepResult) -> List[Path]:
        """
        Write the files of every cell, then the summaries
        :param sweep: The finished sweep
        :raise OutputError: when a file cannot be written
        :return: The written paths
        """
        paths = [path for result in sweep.results for path in self.emit_cell(result)]
        return paths + self.emit_summaries(sweep)
