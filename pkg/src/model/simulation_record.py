from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.model.enums import StrategyKind, TerminatedBy


@dataclass(frozen=True)
class SearchEvent:
    """
    A search performed at the end of a time step, by the listed robots
    """
    step: int
    robots: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SimulationRecord:
    """
    Everything a finished run produced.
    positions[s - 1] holds the robot positions after step s, while avg_uncertainty[s] and searches_cumulative[s]
    start at s = 0 (before the first step).
    For all strategies but SDS a step is one search, so searches_performed == steps_elapsed.
    """
    strategy: StrategyKind
    seed: Optional[int]
    initial_positions: np.ndarray
    positions: np.ndarray
    avg_uncertainty: Tuple[float, ...]
    searches_cumulative: Tuple[int, ...]
    search_events: Tuple[SearchEvent, ...]
    path_lengths: np.ndarray
    terminated_by: TerminatedBy

    def __post_init__(self):
        for name in ('initial_positions', 'positions', 'path_lengths'):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def steps_elapsed(self) -> int:
        return len(self.avg_uncertainty) - 1

    @property
    def searches_performed(self) -> int:
        return self.searches_cumulative[-1]

    @property
    def final_uncertainty(self) -> float:
        return self.avg_uncertainty[-1]

    @property
    def mean_path_length(self) -> float:
        return float(np.mean(self.path_lengths)) if self.path_lengths.size else 0.0
