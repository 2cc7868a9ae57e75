import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from src.model.errors import DuplicatePositionsError, OutOfDomainError

# Two robots closer than this are considered to be at the same point
DUPLICATE_TOLERANCE: float = 1e-9


@dataclass(frozen=True)
class Domain:
    """
    The rectangular search space [0, width] x [0, height], discretized into grid_nx x grid_ny cells.
    Cells are indexed row-major: cell c = row * grid_nx + col, with its center at ((col + 0.5) dx, (row + 0.5) dy).
    All integrals over the domain are midpoint sums over these cell centers, weighted by cell_area.
    """
    width: float = 10.0
    height: float = 10.0
    grid_nx: int = 100
    grid_ny: int = 100

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("Domain width and height must be > 0")
        if self.grid_nx < 2 or self.grid_ny < 2:
            raise ValueError("Domain grid must have at least 2 cells along each axis")
        if not (math.isfinite(self.width) and math.isfinite(self.height)):
            raise ValueError("Domain width and height must be finite")

    @property
    def dx(self) -> float:
        return self.width / self.grid_nx

    @property
    def dy(self) -> float:
        return self.height / self.grid_ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def n_cells(self) -> int:
        return self.grid_nx * self.grid_ny

    @property
    def grid_spacing(self) -> float:
        """
        The smallest distance between two neighbouring cell centers
        """
        return min(self.dx, self.dy)

    @property
    def diameter(self) -> float:
        """
        D(Q), the largest distance between two points of the domain
        """
        return math.hypot(self.width, self.height)

    @cached_property
    def centers(self) -> np.ndarray:
        """
        The cell centers as a read-only (n_cells, 2) array in cell index order
        """
        xs = (np.arange(self.grid_nx) + 0.5) * self.dx
        ys = (np.arange(self.grid_ny) + 0.5) * self.dy
        gx, gy = np.meshgrid(xs, ys)  # rows follow y
        centers = np.column_stack((gx.ravel(), gy.ravel()))
        centers.setflags(write=False)
        return centers

    def contains(self, p) -> bool:
        return 0.0 <= p[0] <= self.width and 0.0 <= p[1] <= self.height


def clamp_to_domain(p, domain: Domain) -> np.ndarray:
    """
    Clamp a point onto the domain rectangle
    :param p: The point (x, y)
    :param domain: The domain to clamp into
    :return: The clamped point as a new array
    """
    return np.array([min(max(float(p[0]), 0.0), domain.width),
                     min(max(float(p[1]), 0.0), domain.height)])


@dataclass(frozen=True, eq=False)
class RobotConfiguration:
    """
    Positions and motion limits of the N robots.
    speed is the per step speed U, max_speed the optional saturation U_max (defaults to speed where needed).
    """
    positions: np.ndarray
    speed: float = 0.5
    max_speed: Optional[float] = None

    def __post_init__(self):
        positions = np.array(self.positions, dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 2 or positions.shape[0] < 1:
            raise ValueError("positions must be a non-empty list of planar points")
        if self.speed <= 0:
            raise ValueError("speed must be > 0")
        if self.max_speed is not None and self.max_speed <= 0:
            raise ValueError("max_speed must be > 0")
        positions.setflags(write=False)
        object.__setattr__(self, 'positions', positions)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def u_max(self) -> float:
        return self.max_speed if self.max_speed is not None else self.speed

    def validate(self, domain: Domain) -> None:
        """
        Check that all robots are inside the domain and pairwise distinct
        :param domain: The domain the robots should be in
        :raise OutOfDomainError: when a robot lies outside of the rectangle
        :raise DuplicatePositionsError: when two robots coincide
        """
        for i, p in enumerate(self.positions):
            if not domain.contains(p):
                raise OutOfDomainError(i, p)

        if self.n > 1:
            diff = self.positions[:, None, :] - self.positions[None, :, :]
            dist = np.hypot(diff[..., 0], diff[..., 1])
            np.fill_diagonal(dist, np.inf)
            i, j = np.unravel_index(np.argmin(dist), dist.shape)
            if dist[i, j] <= DUPLICATE_TOLERANCE:
                raise DuplicatePositionsError(int(min(i, j)), int(max(i, j)))

    def moved(self, positions: np.ndarray) -> 'RobotConfiguration':
        """
        Same motion limits, new positions
        """
        return RobotConfiguration(positions, self.speed, self.max_speed)


def sample_positions(domain: Domain, n: int, rng: np.random.Generator, max_tries: int = 100000) -> np.ndarray:
    """
    Draw n positions uniformly in the domain, rejecting any draw within one grid spacing of an earlier one
    :param domain: The domain to sample in
    :param n: The number of robots
    :param rng: The seeded generator to draw from
    :param max_tries: Give up after this many rejected draws
    :raise RuntimeError: if the domain is too crowded to place n robots
    :return: An (n, 2) array
    """
    if n < 1:
        raise ValueError("At least one robot is required")
    spacing = domain.grid_spacing
    positions = []
    tries = 0
    while len(positions) < n:
        p = rng.uniform((0.0, 0.0), (domain.width, domain.height))
        if all(math.hypot(p[0] - q[0], p[1] - q[1]) > spacing for q in positions):
            positions.append(p)
            continue
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"Could not place {n} robots with spacing {spacing}")
    return np.array(positions)
