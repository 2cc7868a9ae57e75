import logging
import math
from dataclasses import dataclass, replace, field as dataclass_field
from typing import Callable, Dict, List, Optional

import numpy as np

from src.model.density_field import DensityField, MassCentroid, apply_search_min, apply_search_product, \
    average_uncertainty, perceived_mass_centroid, sensing_region
from src.model.domain import DUPLICATE_TOLERANCE, Domain, RobotConfiguration
from src.model.enums import ControlLaw, StrategyKind, TerminatedBy
from src.model.errors import InvalidCombinationError, MissingRangeError
from src.model.sensor import SensorModel
from src.model.simulation_record import SearchEvent, SimulationRecord
from src.model.voronoi import VoronoiPartition, ball_region, compute_voronoi
from src.model.control_params import ControlParams
from src.service.control import command, integrate, range_limited

# Consecutive deployment steps without progress before the SDS barrier is forced
STALL_LIMIT: int = 50
PROGRESS_EPSILON: float = 1e-9


@dataclass(frozen=True)
class StrategySpec:
    """
    Which strategy to run and when to stop.
    cds_law drives every centroid following strategy (CDS, VGS, TGS), sds_law the SDS deployment phase.
    """
    kind: StrategyKind = StrategyKind.CDS
    epsilon: float = 0.002
    max_steps: int = 2000
    rng_seed: int = 0
    cds_law: ControlLaw = ControlLaw.CONSTANT_SPEED
    sds_law: ControlLaw = ControlLaw.SATURATED

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True, eq=False)
class SimulationState:
    """
    The state a step function maps to its successor. The generator is the only mutable part;
    it is shared along one run so the random stream is consumed in step order.
    """
    domain: Domain
    model: SensorModel
    params: ControlParams
    spec: StrategySpec
    config: RobotConfiguration
    field: DensityField
    rng: np.random.Generator
    step: int = 0
    searches: int = 0
    stall_steps: int = 0
    searched: bool = False
    path_lengths: np.ndarray = dataclass_field(default=None)

    def __post_init__(self):
        if self.path_lengths is None:
            object.__setattr__(self, 'path_lengths', np.zeros(self.config.n))


def _resolve_collisions(old: np.ndarray, proposed: np.ndarray) -> np.ndarray:
    """
    Robots are placed in index order; a robot whose new position would coincide with an already placed robot,
    or with a robot that has not moved yet, keeps its old position
    """
    final = old.copy()
    for i in range(len(old)):
        others = np.vstack((final[:i], old[i + 1:]))
        if len(others) and np.min(np.hypot(*(others - proposed[i]).T)) <= DUPLICATE_TOLERANCE:
            logging.getLogger(__name__).debug(f"Robot {i} holds to avoid coinciding with another robot")
            continue
        final[i] = proposed[i]
    return final


def _advance(state: SimulationState, positions: np.ndarray, field: DensityField, searched: bool,
             stall_steps: int = 0) -> SimulationState:
    moved = np.hypot(*(positions - state.config.positions).T)
    return replace(state, config=state.config.moved(positions), field=field, step=state.step + 1,
                   searches=state.searches + (1 if searched else 0), searched=searched,
                   stall_steps=stall_steps, path_lengths=state.path_lengths + moved)


def _search_min(state: SimulationState, positions: np.ndarray) -> DensityField:
    config = state.config.moved(positions)
    return apply_search_min(state.field, config, state.model, compute_voronoi(config, state.domain))


def _follow(state: SimulationState, targets: List[MassCentroid], law: ControlLaw,
            velocity: Optional[Callable[[int, np.ndarray], np.ndarray]] = None) -> np.ndarray:
    """
    Move every robot towards its target with the given law, or with velocity(i, p) when one is passed.
    A robot holds when its target is undefined or closer than half a step.
    """
    speed = state.config.speed
    proposed = state.config.positions.copy()
    for i, (p, mc) in enumerate(zip(state.config.positions, targets)):
        if not mc.defined:
            continue
        if math.hypot(*(mc.centroid - p)) < speed / 2.0:
            continue
        if velocity is not None:
            v = velocity(i, p)
        else:
            v = command(law, p, mc.centroid, state.params,
                        speed if law is ControlLaw.CONSTANT_SPEED else state.config.u_max)
        proposed[i] = integrate(p, v, state.params, state.domain)
    return _resolve_collisions(state.config.positions, proposed)


def _voronoi_targets(state: SimulationState, partition: Optional[VoronoiPartition] = None) -> List[MassCentroid]:
    partition = partition if partition is not None else compute_voronoi(state.config, state.domain)
    return [perceived_mass_centroid(state.field, sensing_region(partition, i, p, state.model), state.model, p)
            for i, p in enumerate(state.config.positions)]


def _ball_targets(state: SimulationState) -> List[MassCentroid]:
    if not state.model.ranged:
        raise MissingRangeError("greedy search")
    return [perceived_mass_centroid(state.field, ball_region(state.domain, i, p, state.model.range), state.model, p)
            for i, p in enumerate(state.config.positions)]


def step_cds(state: SimulationState) -> SimulationState:
    """
    Combined deploy and search: move towards the perceived centroids of the current (range limited) cells,
    then search once at the new positions
    """
    partition = compute_voronoi(state.config, state.domain)
    velocity = None
    if state.model.ranged and state.spec.cds_law is ControlLaw.PROPORTIONAL:
        def velocity(i: int, p: np.ndarray) -> np.ndarray:
            return range_limited(p, partition, state.field, state.model, state.params, i)
    positions = _follow(state, _voronoi_targets(state, partition), state.spec.cds_law, velocity)
    return _advance(state, positions, _search_min(state, positions), searched=True)


def step_sds(state: SimulationState) -> SimulationState:
    """
    Sequential deploy and search. While any robot is farther than d_tol from its centroid the robots deploy
    (partial stepping onto centroids closer than one step). Once all of them are within d_tol the barrier fires
    and the step is a search without motion. A search that leaves every centroid within d_tol is followed directly
    by another search.
    """
    log = logging.getLogger(__name__)
    targets = _voronoi_targets(state)
    positions = state.config.positions
    dists = [math.hypot(*(mc.centroid - p)) if mc.defined else 0.0 for p, mc in zip(positions, targets)]

    forced = state.stall_steps >= STALL_LIMIT
    if forced:
        log.warning(f"Deployment stalled for {state.stall_steps} steps at step {state.step}, forcing search")
    if forced or max(dists) <= state.params.d_tol:
        return _advance(state, positions.copy(), _search_min(state, positions), searched=True)

    u = state.config.u_max
    proposed = positions.copy()
    for i, (p, mc, dist) in enumerate(zip(positions, targets, dists)):
        if not mc.defined or dist == 0.0:
            continue
        if dist <= u:
            proposed[i] = mc.centroid  # partial step
        else:
            proposed[i] = integrate(p, command(state.spec.sds_law, p, mc.centroid, state.params, u),
                                    state.params, state.domain)
    new_positions = _resolve_collisions(positions, proposed)
    progress = float(np.max(np.hypot(*(new_positions - positions).T)))
    stall_steps = state.stall_steps + 1 if progress <= PROGRESS_EPSILON else 0
    return _advance(state, new_positions, state.field, searched=False, stall_steps=stall_steps)


def step_vgs(state: SimulationState) -> SimulationState:
    """
    Voronoi greedy search: steer on the centroid of the whole sensor disc, search cooperatively
    """
    positions = _follow(state, _ball_targets(state), state.spec.cds_law)
    return _advance(state, positions, _search_min(state, positions), searched=True)


def step_tgs(state: SimulationState) -> SimulationState:
    """
    True greedy search: steer like VGS, but every robot reduces every cell within its range
    """
    positions = _follow(state, _ball_targets(state), state.spec.cds_law)
    field = apply_search_product(state.field, state.config.moved(positions), state.model)
    return _advance(state, positions, field, searched=True)


def draw_headings(rng: np.random.Generator, n: int) -> np.ndarray:
    """
    n headings in whole degrees, uniform over [0, 360)
    """
    return rng.integers(0, 360, size=n)


def step_rs(state: SimulationState) -> SimulationState:
    """
    Random search: every robot moves at constant speed along a fresh random heading, then a cooperative search
    """
    headings = np.radians(draw_headings(state.rng, state.config.n))
    speed = state.config.speed
    proposed = np.array([integrate(p, (speed * math.cos(h), speed * math.sin(h)), state.params, state.domain)
                         for p, h in zip(state.config.positions, headings)])
    positions = _resolve_collisions(state.config.positions, proposed)
    return _advance(state, positions, _search_min(state, positions), searched=True)


STEP_FUNCTIONS: Dict[StrategyKind, Callable[[SimulationState], SimulationState]] = {
    StrategyKind.SDS: step_sds,
    StrategyKind.CDS: step_cds,
    StrategyKind.VGS: step_vgs,
    StrategyKind.TGS: step_tgs,
    StrategyKind.RS: step_rs,
}


class SearchService:
    """
    Runs one strategy from an initial configuration and density until the average uncertainty drops to epsilon
    or the step budget is spent. Runs are sequential and synchronous: every robot acts once per step.
    """

    def __init__(self):
        self._log = logging.getLogger(__name__)

    def run(self, domain: Domain, config: RobotConfiguration, model: SensorModel, params: ControlParams,
            spec: StrategySpec, initial_field: Optional[DensityField] = None,
            rng: Optional[np.random.Generator] = None) -> SimulationRecord:
        """
        Execute one run
        :param domain: The search domain
        :param config: Initial robot positions and speeds
        :param model: The sensor model
        :param params: The control parameters
        :param spec: Strategy, threshold, step budget and seed
        :param initial_field: The initial density, uniform 1 when omitted
        :param rng: Generator for the random heading stream, seeded from spec.rng_seed when omitted
        :raise InvalidCombinationError: if a greedy strategy is run without a sensor range
        :return: The record of the run
        """
        if spec.kind.requires_range() and not model.ranged:
            raise InvalidCombinationError(f"{spec.kind.name} needs a sensor range limit")
        config.validate(domain)
        field = initial_field if initial_field is not None else DensityField.uniform(domain)
        if field.domain != domain:
            raise ValueError("The initial density is defined on another domain")

        state = SimulationState(domain, model, params, spec, config, field,
                                rng if rng is not None else np.random.default_rng(spec.rng_seed))
        step = STEP_FUNCTIONS[spec.kind]
        self._log.info(f"Starting {spec.kind.name} run: N={config.n}, R={model.range}, U={config.speed}, "
                       f"seed={spec.rng_seed}")

        positions: List[np.ndarray] = []
        averages = [average_uncertainty(field)]
        searches = [0]
        events: List[SearchEvent] = []
        terminated_by = TerminatedBy.THRESHOLD if averages[0] <= spec.epsilon else TerminatedBy.MAX_STEPS

        while terminated_by is TerminatedBy.MAX_STEPS and state.step < spec.max_steps:
            state = step(state)
            positions.append(state.config.positions.copy())
            averages.append(average_uncertainty(state.field))
            searches.append(state.searches)
            if state.searched:
                events.append(SearchEvent(state.step, tuple(range(config.n))))
            self._log.debug(f"step {state.step}: avg={averages[-1]:.6g} searches={state.searches}")
            if averages[-1] <= spec.epsilon:
                terminated_by = TerminatedBy.THRESHOLD

        self._log.info(f"{spec.kind.name} run ended by {terminated_by.value} after {state.step} steps "
                       f"and {state.searches} searches (avg uncertainty {averages[-1]:.6g})")
        return SimulationRecord(
            strategy=spec.kind,
            seed=spec.rng_seed,
            initial_positions=config.positions,
            positions=np.array(positions).reshape(len(positions), config.n, 2),
            avg_uncertainty=tuple(averages),
            searches_cumulative=tuple(searches),
            search_events=tuple(events),
            path_lengths=state.path_lengths,
            terminated_by=terminated_by,
        )
