from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from src.model.density_field import Bump, DensityField
from src.model.domain import Domain
from src.model.enums import ControlLaw, StrategyKind
from src.model.sensor import SensorModel
from src.model.control_params import ControlParams


@dataclass(frozen=True)
class DensitySpec:
    """
    Description of the initial uncertainty: uniform (value 1) or up to 4 Gaussian bumps
    """
    kind: str = 'uniform'
    bumps: Tuple[Bump, ...] = ()

    def build(self, domain: Domain) -> DensityField:
        if self.kind == 'bumps':
            return DensityField.from_bumps(domain, self.bumps)
        return DensityField.uniform(domain)

    def describe(self) -> str:
        if self.kind == 'bumps':
            return 'bumps: ' + '; '.join(','.join(f"{v:g}" for v in b) for b in self.bumps)
        return 'uniform'


@dataclass(frozen=True)
class ExperimentConfig:
    """
    A fully validated experiment description.
    ranges, n_robots, speeds and strategies span the sweep grid; a single run uses their first entries.
    A range of None means an unlimited sensor.
    """
    width: float = 10.0
    height: float = 10.0
    grid_nx: int = 100
    grid_ny: int = 100
    density: DensitySpec = DensitySpec()
    k: float = 0.5
    alpha: float = 0.5
    ranges: Tuple[Optional[float], ...] = (None,)
    n_robots: Tuple[int, ...] = (5,)
    speeds: Tuple[float, ...] = (0.5,)
    max_speed: Optional[float] = None
    strategies: Tuple[StrategyKind, ...] = (StrategyKind.CDS,)
    epsilon: float = 0.002
    max_steps: int = 2000
    seeds: Tuple[int, ...] = (0,)
    k_prop: float = 1.0
    delta: float = 0.3
    d_tol: float = 0.3
    heading_quantum: int = 1
    cds_law: ControlLaw = ControlLaw.CONSTANT_SPEED
    sds_law: ControlLaw = ControlLaw.SATURATED
    out_dir: Path = Path('out')

    def domain(self) -> Domain:
        return Domain(self.width, self.height, self.grid_nx, self.grid_ny)

    def sensor(self, r: Optional[float]) -> SensorModel:
        return SensorModel(self.k, self.alpha, r)

    def control_params(self) -> ControlParams:
        return ControlParams(k_prop=self.k_prop, delta=self.delta, d_tol=self.d_tol,
                             heading_quantum=self.heading_quantum)
