import logging
import math
from typing import Optional, Tuple

import numpy as np

from src.model.density_field import DensityField, perceived_mass_centroid, sensing_region
from src.model.domain import Domain, RobotConfiguration, clamp_to_domain
from src.model.control_params import ControlParams
from src.model.enums import ControlLaw, Detection
from src.model.errors import MissingRangeError
from src.model.sensor import SensorModel
from src.model.voronoi import VoronoiPartition, compute_voronoi, restrict_cell

_log = logging.getLogger(__name__)


def _vec(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def proportional(p, c, params: ControlParams) -> np.ndarray:
    """
    u = -k_prop (p - c)
    """
    return -params.k_prop * (_vec(p) - _vec(c))


def saturated(p, c, params: ControlParams, u_max: float) -> np.ndarray:
    """
    The proportional law, scaled down to u_max when it would be faster
    """
    if u_max <= 0:
        raise ValueError("u_max must be > 0")
    u = proportional(p, c, params)
    norm = math.hypot(u[0], u[1])
    if norm <= u_max:
        return u
    return u * (u_max / norm)


def constant_speed(p, c, params: ControlParams, u: float) -> np.ndarray:
    """
    Move towards c at speed u, slowing down linearly inside the band of width delta around c
    """
    if u <= 0:
        raise ValueError("u must be > 0")
    offset = _vec(p) - _vec(c)
    dist = math.hypot(offset[0], offset[1])
    if dist >= params.delta:
        return -u * offset / dist
    return -u * offset / params.delta


def range_limited(p, partition: VoronoiPartition, field: DensityField, model: SensorModel,
                  params: ControlParams, i: int) -> np.ndarray:
    """
    The proportional law towards the perceived centroid of V_i intersected with B(p_i, R)
    :param p: The position of robot i
    :param partition: The current Voronoi partition
    :param field: The current density
    :param model: A ranged sensor model
    :param params: The control parameters
    :param i: The robot index
    :raise MissingRangeError: if the sensor has no range
    :return: The velocity, zero when the restricted centroid is undefined
    """
    if not model.ranged:
        raise MissingRangeError("the range limited control law")
    mc = perceived_mass_centroid(field, restrict_cell(partition, i, p, model.range), model, p)
    if not mc.defined:
        return np.zeros(2)
    return proportional(p, mc.centroid, params)


def command(law: ControlLaw, p, c, params: ControlParams, u: float) -> np.ndarray:
    """
    Dispatch to one of the centroid following laws. u is the speed for constant_speed and the cap for saturated.
    """
    if law is ControlLaw.PROPORTIONAL:
        return proportional(p, c, params)
    if law is ControlLaw.SATURATED:
        return saturated(p, c, params, u)
    return constant_speed(p, c, params, u)


def quantize_heading(v: np.ndarray, quantum: int) -> np.ndarray:
    """
    Round the direction of v to the nearest whole degree, keeping its magnitude
    """
    norm = math.hypot(v[0], v[1])
    if quantum == 0 or norm == 0.0:
        return _vec(v)
    heading = math.radians(round(math.degrees(math.atan2(v[1], v[0]))))
    return np.array([norm * math.cos(heading), norm * math.sin(heading)])


def integrate(p, v, params: ControlParams, domain: Domain) -> np.ndarray:
    """
    One first order step p + v dt, with the heading quantized and the result clamped into the domain
    """
    v = quantize_heading(_vec(v), params.heading_quantum)
    return clamp_to_domain(_vec(p) + v * params.dt, domain)


def deploy_to_centroids(field: DensityField, config: RobotConfiguration, model: SensorModel,
                        params: ControlParams, tol: float = 1e-9, max_iterations: int = 10000,
                        partition: Optional[VoronoiPartition] = None,
                        detection: Optional[Detection] = None) -> Tuple[RobotConfiguration, int]:
    """
    Iterate the proportional law with frozen density until no robot moves more than tol,
    ie. drive the robots to a centroidal configuration with respect to the perceived density.
    When a partition is passed it stays frozen, otherwise it is recomputed every iteration.
    :return: The final configuration and the number of iterations used
    """
    domain = field.domain
    positions = config.positions.copy()
    for iteration in range(1, max_iterations + 1):
        current = config.moved(positions)
        cells = partition if partition is not None else compute_voronoi(current, domain)
        new_positions = positions.copy()
        for i, p in enumerate(positions):
            mc = perceived_mass_centroid(field, sensing_region(cells, i, p, model, detection), model, p, detection)
            if mc.defined:
                new_positions[i] = clamp_to_domain(p + proportional(p, mc.centroid, params) * params.dt, domain)
        displacement = float(np.max(np.hypot(*(new_positions - positions).T)))
        positions = new_positions
        if displacement < tol:
            _log.debug(f"Deployment converged after {iteration} iterations")
            return config.moved(positions), iteration
    _log.warning(f"Deployment did not converge within {max_iterations} iterations")
    return config.moved(positions), max_iterations
