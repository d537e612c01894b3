import numpy as np
import pytest

from heliotrope.controller import ControllerConfig, orient, sweep_tilt
from heliotrope.environment import (
    RadianceMap,
    multimodal_recipe,
    sun_disk_radiance,
    synth_scene,
    unimodal_recipe,
)
from heliotrope.sphere import Orientation, SphereGrid, angle_between, direction_from_angles


class TestControllerConfig:
    def test_defaults(self):
        cfg = ControllerConfig()
        assert cfg.tilt_deg == 45.0
        assert cfg.step_deg == 5.0
        assert cfg.threshold == 0.01

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"step_deg": 0.0},
            {"tilt_deg": 0.0},
            {"tilt_deg": 91.0},
            {"threshold": -0.1},
            {"max_iters": 0},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            ControllerConfig(**kwargs)


class TestOrient:
    def test_uniform_scene_converges_immediately(self):
        grid = SphereGrid(64, 32)
        rmap = RadianceMap(grid, np.ones(grid.shape))
        report = orient(rmap, Orientation.zenith(), ControllerConfig())
        assert report.converged
        assert report.iterations == 0
        assert report.axis_steps == 0

    def test_finds_point_sun(self):
        grid = SphereGrid(128, 64)
        sun = direction_from_angles(35.0, 150.0)
        rmap = sun_disk_radiance(sun, grid, 1000.0)
        start = Orientation.from_normal(direction_from_angles(70.0, 330.0))
        report = orient(rmap, start, ControllerConfig())
        assert report.converged
        # within one diagonal actuation step of the sun
        assert angle_between(report.final.normal, sun) < 5.0 * np.sqrt(2.0)

    def test_trajectory_starts_at_start(self):
        grid = SphereGrid(64, 32)
        rmap = synth_scene(unimodal_recipe(3), grid)
        start = Orientation.from_normal(direction_from_angles(50.0, 10.0))
        report = orient(rmap, start, ControllerConfig())
        assert report.trajectory[0] is start
        assert report.iterations == len(report.trajectory) - 1

    def test_max_iters_reported_unconverged(self):
        grid = SphereGrid(64, 32)
        rmap = synth_scene(unimodal_recipe(3), grid)
        start = Orientation.from_normal(direction_from_angles(80.0, 200.0))
        report = orient(rmap, start, ControllerConfig(max_iters=1))
        assert not report.converged
        assert report.iterations == 1

    def test_oscillation_detection_terminates_early(self):
        grid = SphereGrid(128, 64)
        cfg = ControllerConfig(tilt_deg=90.0)
        starts = [
            Orientation.from_normal(direction_from_angles(z, a))
            for z, a in ((60.0, 0.0), (45.0, 120.0), (75.0, 260.0))
        ]
        for seed in range(500, 505):
            rmap = synth_scene(unimodal_recipe(seed), grid)
            for start in starts:
                report = orient(rmap, start, cfg)
                assert report.converged
                assert report.iterations < cfg.max_iters

    def test_threshold_scale_invariance(self):
        grid = SphereGrid(64, 32)
        rmap = synth_scene(multimodal_recipe(9), grid)
        start = Orientation.from_normal(direction_from_angles(40.0, 75.0))
        a = orient(rmap, start, ControllerConfig())
        b = orient(rmap.scaled(1000.0), start, ControllerConfig())
        assert np.allclose(a.final.normal, b.final.normal)
        assert a.iterations == b.iterations

    def test_never_leaves_upper_hemisphere(self):
        grid = SphereGrid(64, 32)
        rmap = synth_scene(multimodal_recipe(2), grid)
        start = Orientation.from_normal(direction_from_angles(88.0, 10.0))
        report = orient(rmap, start, ControllerConfig())
        for o in report.trajectory:
            assert o.normal[2] >= -1e-12


class TestSweepTilt:
    def test_result_shape(self):
        grid = SphereGrid(64, 32)
        maps = [synth_scene(unimodal_recipe(s), grid) for s in range(3)]
        results = sweep_tilt(maps, [45.0, 90.0], starts_per_map=4, field_steps=(19, 36))
        assert [r.tilt_deg for r in results] == [45.0, 90.0]
        for r in results:
            assert 0.0 < r.mean_pct_of_optimal <= 100.5

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sweep_tilt([], [45.0])
