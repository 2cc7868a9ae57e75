import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from src.model.domain import Domain, RobotConfiguration
from src.model.enums import Detection
from src.model.errors import MissingRangeError
from src.model.sensor import SensorModel
from src.model.voronoi import CellRegion, VoronoiPartition, restrict_cell, full_cell

# Below this perceived mass a centroid is undefined and the robot holds its position
MASS_EPSILON: float = 1e-12

# (x, y, sigma, amplitude)
Bump = Tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class DensityField:
    """
    The uncertainty density phi over the grid of a domain, one value in [0, 1] per cell.
    Fields are immutable snapshots: every search update returns a new field.
    """
    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.shape[0] != self.domain.n_cells:
            raise ValueError(f"Expected {self.domain.n_cells} density values, got {values.shape[0]}")
        if np.any(values < 0.0) or np.any(values > 1.0) or not np.all(np.isfinite(values)):
            raise ValueError("Density values must be within [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def cell_area(self) -> float:
        return self.domain.cell_area

    @classmethod
    def uniform(cls, domain: Domain, value: float = 1.0) -> 'DensityField':
        return cls(domain, np.full(domain.n_cells, float(value)))

    @classmethod
    def from_bumps(cls, domain: Domain, bumps: Iterable[Bump]) -> 'DensityField':
        """
        A mixture of Gaussian bumps, clipped to [0, 1]
        :param domain: The domain to sample the bumps on
        :param bumps: Up to 4 (x, y, sigma, amplitude) tuples
        :return: The new field
        """
        bumps = list(bumps)
        if not 1 <= len(bumps) <= 4:
            raise ValueError("A bump density needs between 1 and 4 bumps")
        centers = domain.centers
        values = np.zeros(domain.n_cells)
        for x, y, sigma, amplitude in bumps:
            if sigma <= 0:
                raise ValueError("Bump sigma must be > 0")
            d2 = (centers[:, 0] - x) ** 2 + (centers[:, 1] - y) ** 2
            values += amplitude * np.exp(-d2 / (2.0 * sigma * sigma))
        return cls(domain, np.clip(values, 0.0, 1.0))

    def total(self) -> float:
        """
        The unnormalized uncertainty mass, the integral of phi over the domain
        """
        return float(np.sum(self.values) * self.cell_area)

    def with_values(self, values: np.ndarray) -> 'DensityField':
        return DensityField(self.domain, values)


@dataclass(frozen=True)
class MassCentroid:
    """
    Perceived mass of a region and its centroid (None when the mass vanished)
    """
    mass: float
    centroid: Optional[np.ndarray]

    @property
    def defined(self) -> bool:
        return self.centroid is not None


def average_uncertainty(field: DensityField) -> float:
    """
    The integral of phi divided by the area of the domain. With equal cells this is the plain mean of the cell
    values, which keeps a constant field exactly at its constant.
    :param field: The density field
    :return: A value in [0, 1]
    """
    return float(np.mean(field.values))


def owner_distances(domain: Domain, positions: np.ndarray, partition: VoronoiPartition) -> np.ndarray:
    """
    Distance from every cell center to the robot owning the cell
    """
    delta = domain.centers - positions[partition.owner]
    return np.hypot(delta[:, 0], delta[:, 1])


def apply_search_min(field: DensityField, config: RobotConfiguration, model: SensorModel,
                     partition: VoronoiPartition) -> DensityField:
    """
    One cooperative search: every cell is reduced by its Voronoi owner only.
    The owner is the nearest robot and the detection function is non-decreasing, so this is the minimum over
    all robots. With a range, cells out of range of their owner keep their exact value.
    :param field: The density before the search
    :param config: The robot positions at search time
    :param model: The sensor model
    :param partition: The Voronoi partition of config
    :return: The density after the search
    """
    factor = model.detection(owner_distances(field.domain, config.positions, partition))
    return field.with_values(field.values * factor)


def apply_search_product(field: DensityField, config: RobotConfiguration, model: SensorModel) -> DensityField:
    """
    One duplicated search: every robot reduces every cell within its range, independently of the others
    :param field: The density before the search
    :param config: The robot positions at search time
    :param model: A ranged sensor model
    :raise MissingRangeError: if the sensor has no range
    :return: The density after the search
    """
    if not model.ranged:
        raise MissingRangeError("the product update")
    centers = field.domain.centers
    product = np.ones(field.domain.n_cells)
    for p in config.positions:
        product *= model.beta_hat(np.hypot(centers[:, 0] - p[0], centers[:, 1] - p[1]))
    return field.with_values(field.values * product)


def perceived_mass_centroid(field: DensityField, region: CellRegion, model: SensorModel, p_i,
                            detection: Optional[Detection] = None) -> MassCentroid:
    """
    Mass and centroid of the region under the perceived density phi(q) k exp(-alpha |p_i - q|^2)
    :param field: The density field
    :param region: The cells to integrate over
    :param model: The sensor model
    :param p_i: The position of the robot perceiving the density
    :param detection: Detection variant to build the weight from, defaults to the model's own
    :return: The mass and centroid, undefined when the mass is below MASS_EPSILON
    """
    if len(region) == 0:
        return MassCentroid(0.0, None)
    centers = field.domain.centers[region.cells]
    d = np.hypot(centers[:, 0] - p_i[0], centers[:, 1] - p_i[1])
    w = field.values[region.cells] * model.perceived_weight(d, detection) * field.cell_area
    mass = float(np.sum(w))
    if mass < MASS_EPSILON:
        return MassCentroid(mass, None)
    return MassCentroid(mass, (centers * w[:, None]).sum(axis=0) / mass)


def sensing_region(partition: VoronoiPartition, i: int, p_i, model: SensorModel,
                   detection: Optional[Detection] = None) -> CellRegion:
    """
    The cells robot i steers on: its Voronoi cell, restricted to its sensor disc for the ranged detections
    """
    detection = detection or model.default_detection()
    if detection is Detection.BETA:
        return full_cell(partition, i)
    if not model.ranged:
        raise MissingRangeError(detection.value)
    return restrict_cell(partition, i, p_i, model.range)


def objective(field: DensityField, config: RobotConfiguration, partition: VoronoiPartition, model: SensorModel,
              detection: Optional[Detection] = None) -> float:
    """
    H = sum_i integral over the (range limited) cell of robot i of phi (1 - detection(|p_i - q|)).
    For the model's own detection this is the uncertainty mass the next search removes.
    The partition is taken as given, so passing a stale one evaluates H with frozen cells.
    :return: The objective value
    """
    d = owner_distances(field.domain, config.positions, partition)
    w = model.objective_weight(d, detection)
    return float(np.sum(field.values * w) * field.cell_area)


def objective_gradient(field: DensityField, config: RobotConfiguration, partition: VoronoiPartition,
                       model: SensorModel, i: int, detection: Optional[Detection] = None) -> np.ndarray:
    """
    dH/dp_i = -2 alpha M (p_i - C) with M, C the perceived mass and centroid of robot i's (range limited) cell.
    This points towards the centroid: H increases along it.
    :return: The gradient, zero when the centroid is undefined
    """
    p_i = config.positions[i]
    mc = perceived_mass_centroid(field, sensing_region(partition, i, p_i, model, detection), model, p_i, detection)
    if not mc.defined:
        return np.zeros(2)
    return -2.0 * model.alpha * mc.mass * (p_i - mc.centroid)


def worst_case_factor(model: SensorModel, domain: Domain) -> float:
    """
    l = 1 - k exp(-alpha D(Q)^2), the largest factor an unlimited sensor leaves anywhere in the domain
    """
    return 1.0 - model.k * math.exp(-model.alpha * domain.diameter ** 2)
