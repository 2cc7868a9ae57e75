import math

import numpy as np
import pytest

from src.model.control_params import ControlParams
from src.model.density_field import DensityField, objective, perceived_mass_centroid
from src.model.domain import RobotConfiguration
from src.model.enums import ControlLaw
from src.model.errors import MissingRangeError
from src.model.sensor import SensorModel
from src.model.voronoi import compute_voronoi, full_cell
from src.service.control import command, constant_speed, deploy_to_centroids, integrate, proportional, \
    quantize_heading, range_limited, saturated


class TestControlParams:

    def test_invalid(self):
        with pytest.raises(ValueError):
            ControlParams(k_prop=0.0)
        with pytest.raises(ValueError):
            ControlParams(heading_quantum=5)


class TestProportional:

    def test_at_target(self, params):
        np.testing.assert_array_equal(proportional((2.0, 3.0), (2.0, 3.0), params), (0.0, 0.0))

    def test_unit_gain(self, params):
        np.testing.assert_allclose(proportional((0.0, 0.0), (1.0, 0.0), params), (1.0, 0.0))


class TestSaturated:

    def test_unsaturated_branch(self, params):
        np.testing.assert_allclose(saturated((0.0, 0.0), (0.1, 0.2), params, 0.5),
                                   proportional((0.0, 0.0), (0.1, 0.2), params))

    def test_saturated_branch(self, params):
        np.testing.assert_allclose(saturated((0.0, 0.0), (10.0, 0.0), params, 0.5), (0.5, 0.0))

    def test_never_exceeds_cap(self, params):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            p, c = rng.uniform(0.0, 10.0, 2), rng.uniform(0.0, 10.0, 2)
            u_max = float(rng.uniform(0.01, 2.0))
            assert math.hypot(*saturated(p, c, params, u_max)) <= u_max * (1.0 + 1e-12)

    def test_invalid_cap(self, params):
        with pytest.raises(ValueError):
            saturated((0.0, 0.0), (1.0, 0.0), params, 0.0)


class TestConstantSpeed:

    def test_continuous_at_band_edge(self, params):
        outer = constant_speed((0.0, 0.0), (params.delta, 0.0), params, 0.5)
        inner = constant_speed((0.0, 0.0), (params.delta - 1e-12, 0.0), params, 0.5)
        assert math.hypot(*outer) == pytest.approx(0.5)
        assert math.hypot(*inner) == pytest.approx(0.5)

    def test_at_target(self, params):
        np.testing.assert_array_equal(constant_speed((1.0, 1.0), (1.0, 1.0), params, 0.5), (0.0, 0.0))

    def test_outer_branch(self, params):
        v = constant_speed((1.0, 1.0), (1.0, 1.0 + 2.0 * params.delta), params, 0.5)
        assert math.hypot(*v) == pytest.approx(0.5, abs=1e-15)
        assert v[1] > 0.0

    def test_dispatch(self, params):
        np.testing.assert_allclose(command(ControlLaw.CONSTANT_SPEED, (0.0, 0.0), (3.0, 4.0), params, 0.5),
                                   (0.3, 0.4))
        np.testing.assert_allclose(command(ControlLaw.SATURATED, (0.0, 0.0), (3.0, 4.0), params, 1.0), (0.6, 0.8))
        np.testing.assert_allclose(command(ControlLaw.PROPORTIONAL, (0.0, 0.0), (3.0, 4.0), params, 1.0),
                                   (3.0, 4.0))


class TestRangeLimited:

    def test_unrestricted_when_range_covers_domain(self, domain, model, params, random_config):
        config = random_config(domain, 5, 8)
        field = DensityField(domain, np.random.default_rng(8).uniform(0.0, 1.0, domain.n_cells))
        partition = compute_voronoi(config, domain)
        ranged = SensorModel(range=domain.diameter)
        for i, p in enumerate(config.positions):
            c = perceived_mass_centroid(field, full_cell(partition, i), model, p).centroid
            np.testing.assert_allclose(range_limited(p, partition, field, ranged, params, i),
                                       proportional(p, c, params), atol=1e-12)

    def test_holds_without_mass(self, domain, params):
        config = RobotConfiguration([(2.0, 2.0), (8.0, 8.0)])
        v = range_limited(config.positions[0], compute_voronoi(config, domain), DensityField.uniform(domain, 0.0),
                          SensorModel(range=1.0), params, 0)
        np.testing.assert_array_equal(v, (0.0, 0.0))

    def test_matches_restricted_centroid(self, domain, params, random_config):
        model = SensorModel(range=1.5)
        config = random_config(domain, 6, 31)
        field = DensityField(domain, np.random.default_rng(31).uniform(0.0, 1.0, domain.n_cells))
        partition = compute_voronoi(config, domain)
        for i, p in enumerate(config.positions):
            d = np.hypot(*(domain.centers - p).T)
            inside = (partition.owner == i) & (d <= 1.5)
            w = field.values[inside] * 0.5 * np.exp(-0.5 * d[inside] ** 2)
            expected = (domain.centers[inside] * w[:, None]).sum(axis=0) / w.sum() - p
            np.testing.assert_allclose(range_limited(p, partition, field, model, params, i), expected, atol=1e-9)

    def test_requires_range(self, domain, model, params):
        config = RobotConfiguration([(2.0, 2.0)])
        with pytest.raises(MissingRangeError):
            range_limited(config.positions[0], compute_voronoi(config, domain), DensityField.uniform(domain),
                          model, params, 0)


class TestIntegrate:

    def test_zero_velocity(self, domain, params):
        np.testing.assert_array_equal(integrate((3.0, 4.0), (0.0, 0.0), params, domain), (3.0, 4.0))

    def test_clamped(self, domain, params):
        np.testing.assert_allclose(integrate((9.8, 5.0), (0.5, 0.0), params, domain), (10.0, 5.0))

    def test_heading_rounded_to_degree(self, domain, params):
        heading = math.radians(44.6)
        p = integrate((5.0, 5.0), (0.5 * math.cos(heading), 0.5 * math.sin(heading)), params, domain)
        step = p - (5.0, 5.0)
        assert math.hypot(*step) == pytest.approx(0.5)
        assert math.degrees(math.atan2(step[1], step[0])) == pytest.approx(45.0)

    def test_quantization_off(self):
        v = np.array([0.3, 0.1])
        np.testing.assert_array_equal(quantize_heading(v, 0), v)


class TestProportionalStep:

    def test_increases_objective(self, domain, model, random_config):
        params = ControlParams(k_prop=1e-3, heading_quantum=0)
        rng = np.random.default_rng(41)
        for instance in range(20):
            config = random_config(domain, int(rng.integers(2, 9)), 900 + instance)
            field = DensityField(domain, rng.uniform(0.0, 1.0, domain.n_cells))
            partition = compute_voronoi(config, domain)
            positions = config.positions.copy()
            for i, p in enumerate(config.positions):
                c = perceived_mass_centroid(field, full_cell(partition, i), model, p).centroid
                positions[i] = integrate(p, proportional(p, c, params), params, domain)
            moved = config.moved(positions)
            before = objective(field, config, partition, model)
            assert objective(field, moved, partition, model) > before
            # the recomputed partition only adds to it
            assert objective(field, moved, compute_voronoi(moved, domain), model) > before


class TestDeployToCentroids:

    def test_fixed_point_stops_every_law(self, domain, params, random_config):
        # with alpha = 0.1 the centroid map contracts on every cell of the domain
        model = SensorModel(k=0.5, alpha=0.1)
        config = random_config(domain, 5, 17)
        field = DensityField.uniform(domain)
        partition = compute_voronoi(config, domain)
        settled, iterations = deploy_to_centroids(field, config, model, params, partition=partition)
        assert iterations < 10000
        ranged = SensorModel(k=0.5, alpha=0.1, range=2.0 * domain.diameter)
        for i, p in enumerate(settled.positions):
            c = perceived_mass_centroid(field, full_cell(partition, i), model, p).centroid
            for v in (proportional(p, c, params), saturated(p, c, params, 0.5), constant_speed(p, c, params, 0.5),
                      range_limited(p, partition, field, ranged, params, i)):
                np.testing.assert_allclose(v, (0.0, 0.0), atol=1e-8)

    def test_recomputed_partition_moves_robots_apart(self, domain, model, params):
        config = RobotConfiguration([(4.9, 5.0), (5.1, 5.0)])
        settled, _ = deploy_to_centroids(DensityField.uniform(domain), config, model, params, max_iterations=20)
        assert settled.positions[0][0] < 4.9
        assert settled.positions[1][0] > 5.1
