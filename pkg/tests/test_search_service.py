import numpy as np
import pytest

from src.model.density_field import DensityField
from src.model.domain import Domain, RobotConfiguration
from src.model.enums import ControlLaw, StrategyKind, TerminatedBy
from src.model.errors import InvalidCombinationError
from src.model.sensor import SensorModel
from src.model.voronoi import compute_voronoi
from src.service import control, search_service
from src.service.search_service import STALL_LIMIT, SearchService, SimulationState, StrategySpec, \
    _resolve_collisions, draw_headings, step_cds, step_rs, step_sds, step_tgs, step_vgs


def run(domain, config, model, params, kind=StrategyKind.CDS, field=None, **spec):
    return SearchService().run(domain, config, model, params, StrategySpec(kind=kind, **spec), field)


class TestTermination:

    def test_vacuous_threshold(self, domain, model, params, random_config):
        record = run(domain, random_config(domain, 3, 0), model, params, epsilon=1.0)
        assert record.steps_elapsed == 0
        assert record.terminated_by is TerminatedBy.THRESHOLD
        assert record.positions.shape == (0, 3, 2)
        assert record.avg_uncertainty == (1.0,)

    def test_step_cap(self, domain, model, params, random_config):
        record = run(domain, random_config(domain, 3, 0), model, params, max_steps=1)
        assert record.steps_elapsed == 1
        assert record.positions.shape == (1, 3, 2)
        assert record.terminated_by is TerminatedBy.MAX_STEPS

    def test_zero_density(self, domain, model, params, random_config):
        config = random_config(domain, 4, 2)
        record = run(domain, config, model, params, field=DensityField.uniform(domain, 0.0))
        assert record.terminated_by is TerminatedBy.THRESHOLD
        assert record.steps_elapsed == 0
        np.testing.assert_array_equal(record.initial_positions, config.positions)

    def test_greedy_needs_range(self, domain, model, params, random_config):
        for kind in (StrategyKind.VGS, StrategyKind.TGS):
            with pytest.raises(InvalidCombinationError):
                run(domain, random_config(domain, 3, 0), model, params, kind=kind)

    def test_field_on_other_domain(self, domain, small_domain, model, params):
        with pytest.raises(ValueError):
            run(domain, RobotConfiguration([(1.0, 1.0)]), model, params, field=DensityField.uniform(small_domain))


class TestCombinedDeployAndSearch:

    def test_single_robot_closed_form(self, domain, model, params):
        record = run(domain, RobotConfiguration([(5.0, 5.0)]), model, params, max_steps=4)
        assert np.all(record.positions == 5.0)
        beta = model.beta(np.hypot(*(domain.centers - (5.0, 5.0)).T))
        for n in range(5):
            assert record.avg_uncertainty[n] == pytest.approx(np.mean(beta ** n), rel=1e-12)

    def test_record_accounting(self, domain, model, params, random_config):
        record = run(domain, random_config(domain, 4, 6), model, params, max_steps=5)
        assert record.searches_cumulative == (0, 1, 2, 3, 4, 5)
        assert record.searches_performed == record.steps_elapsed == 5
        assert [e.step for e in record.search_events] == [1, 2, 3, 4, 5]
        assert record.search_events[0].robots == (0, 1, 2, 3)
        assert np.all(record.path_lengths <= 5 * 0.5 + 1e-12)
        assert all(a >= b for a, b in zip(record.avg_uncertainty, record.avg_uncertainty[1:]))

    def test_contraction_bound(self, domain, model, params, random_config):
        record = run(domain, random_config(domain, 5, 1), model, params)
        bound = 1.0 - model.k * np.exp(-model.alpha * domain.diameter ** 2)
        for n, avg in enumerate(record.avg_uncertainty):
            assert avg <= bound ** n
        assert record.terminated_by is TerminatedBy.THRESHOLD
        assert record.final_uncertainty <= 0.002


class TestSequentialDeployAndSearch:

    def _state(self, domain, model, params, positions, **kwargs):
        config = RobotConfiguration(positions)
        return SimulationState(domain, model, params, StrategySpec(kind=StrategyKind.SDS), config,
                               DensityField.uniform(domain), np.random.default_rng(0), **kwargs)

    def test_searches_at_centroid(self, domain, model, params):
        record = run(domain, RobotConfiguration([(5.0, 5.0)]), model, params, kind=StrategyKind.SDS, max_steps=3)
        assert record.searches_cumulative == (0, 1, 2, 3)
        assert np.all(record.positions == 5.0)

    def test_deploys_before_searching(self, domain, model, params):
        state = self._state(domain, model, params, [(0.5, 0.5), (9.5, 9.5)])
        after = step_sds(state)
        assert not after.searched
        assert after.searches == 0
        assert after.field is state.field
        assert np.all(after.path_lengths > 0.0)

    def test_stall_forces_search(self, domain, model, params):
        state = self._state(domain, model, params, [(0.5, 0.5), (9.5, 9.5)], stall_steps=STALL_LIMIT)
        after = step_sds(state)
        assert after.searched
        np.testing.assert_array_equal(after.config.positions, state.config.positions)
        assert after.stall_steps == 0

    def test_search_steps_do_not_move(self, domain, model, params, random_config):
        record = run(domain, random_config(domain, 4, 3), model, params, kind=StrategyKind.SDS, max_steps=60)
        assert record.searches_performed < record.steps_elapsed
        previous = np.vstack(([record.initial_positions], record.positions[:-1]))
        for event in record.search_events:
            np.testing.assert_array_equal(record.positions[event.step - 1], previous[event.step - 1])


class TestGreedySearch:

    def test_single_robot_vgs_equals_cds(self, domain, params):
        model = SensorModel(range=2.0)
        config = RobotConfiguration([(2.0, 3.0)])
        cds = run(domain, config, model, params, max_steps=15)
        vgs = run(domain, config, model, params, kind=StrategyKind.VGS, max_steps=15)
        np.testing.assert_array_equal(cds.positions, vgs.positions)
        assert cds.avg_uncertainty == vgs.avg_uncertainty

    def test_single_robot_tgs_equals_vgs(self, domain, params):
        model = SensorModel(range=2.0)
        config = RobotConfiguration([(7.0, 1.5)])
        vgs = run(domain, config, model, params, kind=StrategyKind.VGS, max_steps=15)
        tgs = run(domain, config, model, params, kind=StrategyKind.TGS, max_steps=15)
        np.testing.assert_array_equal(vgs.positions, tgs.positions)
        assert vgs.avg_uncertainty == tgs.avg_uncertainty


class TestRandomSearch:

    def test_deterministic(self, domain, model, params, random_config):
        config = random_config(domain, 5, 4)
        a = run(domain, config, model, params, kind=StrategyKind.RS, max_steps=20, rng_seed=12)
        b = run(domain, config, model, params, kind=StrategyKind.RS, max_steps=20, rng_seed=12)
        c = run(domain, config, model, params, kind=StrategyKind.RS, max_steps=20, rng_seed=13)
        np.testing.assert_array_equal(a.positions, b.positions)
        assert a.avg_uncertainty == b.avg_uncertainty
        assert not np.array_equal(a.positions, c.positions)

    def test_headings_uniform(self):
        headings = draw_headings(np.random.default_rng(42), 360000)
        assert headings.min() >= 0 and headings.max() <= 359
        counts = np.bincount(headings, minlength=360)
        expected = 1000.0
        chi2 = np.sum((counts - expected) ** 2 / expected)
        assert chi2 < 520.0  # 359 degrees of freedom, about 6 sigma
        assert np.all(np.abs(counts - expected) < 5.0 * np.sqrt(expected))

    def test_constant_speed_steps(self, domain, model, params):
        record = run(domain, RobotConfiguration([(5.0, 5.0), (3.0, 3.0)]), model, params, kind=StrategyKind.RS,
                     max_steps=4)
        steps = np.diff(np.vstack(([record.initial_positions], record.positions)), axis=0)
        np.testing.assert_allclose(np.hypot(steps[..., 0], steps[..., 1]), 0.5, rtol=1e-12)


class TestRangeLimit:

    @pytest.mark.parametrize('step', [step_cds, step_vgs, step_tgs, step_rs])
    def test_out_of_range_cells_are_untouched(self, domain, params, random_config, step):
        model = SensorModel(range=1.0)
        field = DensityField(domain, np.random.default_rng(8).uniform(0.0, 1.0, domain.n_cells))
        state = SimulationState(domain, model, params, StrategySpec(), random_config(domain, 5, 8), field,
                                np.random.default_rng(8))
        after = step(state)
        d = np.min([np.hypot(*(domain.centers - p).T) for p in after.config.positions], axis=0)
        far = d > 1.0
        assert far.any()
        np.testing.assert_array_equal(after.field.values[far], field.values[far])


class TestCollisions:

    def test_robot_holds_instead_of_coinciding(self):
        old = np.array([(1.0, 1.0), (2.0, 2.0)])
        np.testing.assert_array_equal(_resolve_collisions(old, np.array([(2.0, 2.0), (3.0, 3.0)])),
                                      [(1.0, 1.0), (3.0, 3.0)])
        np.testing.assert_array_equal(_resolve_collisions(old, np.array([(3.0, 3.0), (3.0, 3.0)])),
                                      [(3.0, 3.0), (2.0, 2.0)])

    def test_runs_never_produce_duplicates(self, params):
        domain = Domain(2.0, 2.0, 20, 20)
        config = RobotConfiguration([(0.5, 0.5), (1.5, 1.5), (0.5, 1.5), (1.5, 0.5)], speed=1.0)
        record = run(domain, config, SensorModel(), params, kind=StrategyKind.RS, max_steps=50)
        for positions in record.positions:
            RobotConfiguration(positions).validate(domain)


class TestRangedProportionalCds:

    def test_follows_range_limited_law(self, domain, params, random_config, monkeypatch):
        model = SensorModel(range=2.0)
        field = DensityField(domain, np.random.default_rng(11).uniform(0.0, 1.0, domain.n_cells))
        config = random_config(domain, 5, 11)
        state = SimulationState(domain, model, params, StrategySpec(cds_law=ControlLaw.PROPORTIONAL), config, field,
                                np.random.default_rng(0))
        moved = []

        def spy(p, partition, field, model, params, i):
            moved.append(i)
            return control.range_limited(p, partition, field, model, params, i)

        monkeypatch.setattr(search_service, 'range_limited', spy)
        after = step_cds(state)
        assert moved
        partition = compute_voronoi(config, domain)
        for i, p in enumerate(config.positions):
            expected = p
            if i in moved:
                expected = control.integrate(p, control.range_limited(p, partition, field, model, params, i),
                                             params, domain)
            np.testing.assert_array_equal(after.config.positions[i], expected)
