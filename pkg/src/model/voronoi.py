from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.model.domain import Domain, RobotConfiguration


@dataclass(frozen=True, eq=False)
class VoronoiPartition:
    """
    Discrete Voronoi partition of the grid.
    owner[c] is the index of the robot nearest to the center of cell c (lowest index on ties),
    neighbors[i] lists the robots whose cells touch the cell of robot i (the Delaunay graph).
    """
    domain: Domain
    owner: np.ndarray
    neighbors: Tuple[Tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.neighbors)

    def cells_of(self, i: int) -> np.ndarray:
        """
        The sorted cell indices owned by robot i
        """
        return np.flatnonzero(self.owner == i)

    def limited_neighbors(self, positions: np.ndarray, r: float) -> Tuple[Tuple[int, ...], ...]:
        """
        The r-limited Delaunay graph: Delaunay neighbors that are at most 2r apart,
        ie. whose range limited regions can touch
        :param positions: The robot positions the partition was built from
        :param r: The sensor range
        :return: Adjacency lists per robot
        """
        limited = []
        for i, nbrs in enumerate(self.neighbors):
            limited.append(tuple(j for j in nbrs
                                 if np.hypot(*(positions[i] - positions[j])) <= 2.0 * r))
        return tuple(limited)


@dataclass(frozen=True, eq=False)
class CellRegion:
    """
    A set of grid cells attributed to one robot, eg. its Voronoi cell intersected with its sensor disc
    """
    cells: np.ndarray
    owner: int

    def __len__(self):
        return len(self.cells)

    def as_set(self) -> frozenset:
        return frozenset(int(c) for c in self.cells)


def squared_distances(centers: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """
    Squared distances between every robot and every cell center
    :return: An (N, n_cells) array
    """
    dx = centers[None, :, 0] - positions[:, None, 0]
    dy = centers[None, :, 1] - positions[:, None, 1]
    return dx * dx + dy * dy


def compute_voronoi(config: RobotConfiguration, domain: Domain) -> VoronoiPartition:
    """
    Assign every grid cell to its nearest robot and derive the neighbor graph from owner changes
    between 4-connected cells
    :param config: The robot configuration, validated against the domain
    :param domain: The gridded domain
    :raise DuplicatePositionsError: if two robots coincide
    :raise OutOfDomainError: if a robot is outside of the domain
    :return: The partition
    """
    config.validate(domain)
    # argmin keeps the first minimum, so ties go to the lowest robot index
    owner = np.argmin(squared_distances(domain.centers, config.positions), axis=0)
    owner.setflags(write=False)

    grid = owner.reshape(domain.grid_ny, domain.grid_nx)
    adjacency = [set() for _ in range(config.n)]
    for a, b in ((grid[:, :-1], grid[:, 1:]), (grid[:-1, :], grid[1:, :])):
        changed = a != b
        for i, j in set(zip(a[changed].tolist(), b[changed].tolist())):
            adjacency[i].add(j)
            adjacency[j].add(i)

    return VoronoiPartition(domain, owner, tuple(tuple(sorted(s)) for s in adjacency))


def restrict_cell(partition: VoronoiPartition, i: int, p_i, r: float) -> CellRegion:
    """
    The part of robot i's Voronoi cell that is within sensor range: V_i intersected with the closed disc B(p_i, r)
    :param partition: The Voronoi partition
    :param i: The robot index
    :param p_i: The position of robot i
    :param r: The sensor range
    :return: The (possibly empty) region
    """
    if r <= 0:
        raise ValueError("Range must be > 0")
    if not 0 <= i < partition.n:
        raise IndexError(f"Robot index {i} out of range")
    cells = partition.cells_of(i)
    centers = partition.domain.centers[cells]
    d2 = (centers[:, 0] - p_i[0]) ** 2 + (centers[:, 1] - p_i[1]) ** 2
    return CellRegion(cells[d2 <= r * r], i)


def full_cell(partition: VoronoiPartition, i: int) -> CellRegion:
    return CellRegion(partition.cells_of(i), i)


def ball_region(domain: Domain, i: int, p_i, r: float) -> CellRegion:
    """
    All cells within range r of p_i, whoever owns them. This is what a greedy robot steers on.
    :param domain: The gridded domain
    :param i: The robot the region is attributed to
    :param p_i: The center of the disc
    :param r: The radius
    :return: The region
    """
    if r <= 0:
        raise ValueError("Range must be > 0")
    centers = domain.centers
    d2 = (centers[:, 0] - p_i[0]) ** 2 + (centers[:, 1] - p_i[1]) ** 2
    return CellRegion(np.flatnonzero(d2 <= r * r), i)
