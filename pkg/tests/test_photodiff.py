import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heliotrope.environment import RadianceMap, sun_disk_radiance
from heliotrope.photodiff import (
    DetectorRig,
    blur_profile,
    box_spectrum,
    clipped_cosine,
    count_modes_1d,
    gaussian_fit_error,
    impulse_pair_response,
    kernel_first_zero_crossing,
    kernel_spectrum,
    make_profile,
    mode_positions_1d,
    new_mode_count,
    photodiff_equals_blurred_derivative,
    photodifferential_1d,
    profile_corpus_radiance,
    read_photodifferential,
    sampled_impulse_pair_spectrum,
)
from heliotrope.sphere import Orientation, SphereGrid, angle_between, direction_from_angles


class TestDetectorRig:
    def test_four_detectors_at_tilt(self):
        panel = Orientation.from_normal(direction_from_angles(20.0, 50.0))
        rig = DetectorRig(panel, 45.0)
        dets = rig.orientations()
        assert set(dets) == {"u+", "u-", "v+", "v-"}
        for o in dets.values():
            assert angle_between(o.normal, panel.normal) == pytest.approx(45.0, abs=1e-9)

    def test_detectors_may_dip_below_horizon(self):
        panel = Orientation.from_normal(direction_from_angles(60.0, 0.0))
        dets = DetectorRig(panel, 45.0).orientations()
        assert min(o.normal[2] for o in dets.values()) < 0.0

    def test_tilt_range(self):
        panel = Orientation.zenith()
        with pytest.raises(ValueError):
            DetectorRig(panel, 0.0)
        with pytest.raises(ValueError):
            DetectorRig(panel, 90.5)


class TestReadPhotodifferential:
    def test_uniform_scene_reads_zero(self):
        grid = SphereGrid(64, 32)
        rmap = RadianceMap(grid, np.ones(grid.shape))
        reading = read_photodifferential(rmap, Orientation.zenith(), 45.0)
        assert reading.e_d_u == pytest.approx(0.0, abs=1e-9)
        assert reading.e_d_v == pytest.approx(0.0, abs=1e-9)
        assert reading.mean_raw == pytest.approx(np.pi, rel=5e-3)

    def test_sign_points_toward_source(self):
        grid = SphereGrid(128, 64)
        panel = Orientation.zenith()
        # sun 40 degrees from the panel normal, within the (u, normal) plane
        sun = np.sin(np.deg2rad(40.0)) * panel.u + np.cos(np.deg2rad(40.0)) * panel.normal
        rmap = sun_disk_radiance(sun, grid, 1000.0)
        reading = read_photodifferential(rmap, panel, 45.0)
        # a positive rotation about v carries the normal toward +u, so a
        # source on the +u side registers as a positive v-axis difference
        assert reading.e_d_v > 0.0
        assert abs(reading.e_d_u) < abs(reading.e_d_v) / 10.0

    def test_units_are_per_radian(self):
        grid = SphereGrid(64, 32)
        rmap = sun_disk_radiance(direction_from_angles(40.0, 0.0), grid, 1000.0)
        r = read_photodifferential(rmap, Orientation.zenith(), 45.0)
        span = 2.0 * np.deg2rad(45.0)
        assert r.e_d_u == pytest.approx((r.raw["u+"] - r.raw["u-"]) / span)


class TestProfiles1D:
    def test_uniform_profile_blurs_to_pi(self):
        p = blur_profile(make_profile(np.full(1440, 2.0), 45.0))
        assert np.allclose(p.irradiance, 2.0 * np.pi, rtol=1e-5)
        assert np.allclose(p.blurred, 2.0 * np.pi, rtol=1e-5)

    def test_minimum_samples(self):
        with pytest.raises(ValueError):
            make_profile(np.ones(100), 45.0)

    def test_blur_preserves_mean(self):
        L = profile_corpus_radiance(3)
        p = blur_profile(make_profile(L, 60.0))
        assert np.mean(p.blurred) == pytest.approx(np.mean(p.irradiance), rel=1e-9)

    @given(st.integers(0, 1000))
    @settings(max_examples=20, deadline=None)
    def test_finite_difference_equals_blurred_derivative(self, seed):
        L = profile_corpus_radiance(seed)
        p = blur_profile(make_profile(L, 45.0))
        dev = photodiff_equals_blurred_derivative(p)
        scale = float(np.max(np.abs(photodifferential_1d(p))))
        assert dev < 0.01 * max(scale, 1e-12)

    def test_equivalence_sharpens_with_resolution(self):
        L1 = profile_corpus_radiance(5, samples=1440)
        L2 = profile_corpus_radiance(5, samples=2880)
        d1 = photodiff_equals_blurred_derivative(blur_profile(make_profile(L1, 45.0)))
        d2 = photodiff_equals_blurred_derivative(blur_profile(make_profile(L2, 45.0)))
        assert d2 < d1


class TestFrequencyDomain:
    @pytest.mark.parametrize("tilt", [5.0, 20.0, 45.0, 90.0])
    def test_sampled_spectrum_matches_closed_form(self, tilt):
        n = 4096
        spec, tilt_q = sampled_impulse_pair_spectrum(tilt, n)
        omega = np.fft.fftfreq(n, d=1.0 / n)
        expected = impulse_pair_response(tilt_q, omega)
        scale = float(np.max(np.abs(expected)))
        assert np.max(np.abs(spec - expected)) < 1e-6 * scale

    def test_zero_response_at_dc(self):
        assert impulse_pair_response(np.deg2rad(45.0), 0.0) == 0.0

    def test_kernel_spectrum_values(self):
        assert kernel_spectrum(0.0) == pytest.approx(2.0)
        assert kernel_spectrum(1.0) == pytest.approx(np.pi / 2.0)
        assert kernel_spectrum(3.0) == pytest.approx(0.0, abs=1e-12)
        # even harmonics above the fundamental decay like 1/w^2
        assert kernel_spectrum(4.0) < kernel_spectrum(2.0)

    def test_kernel_first_zero_at_three(self):
        assert kernel_first_zero_crossing(4096) == 3

    def test_quarter_turn_box_kills_even_harmonics(self):
        tilt = np.pi / 2.0
        for w in (2, 4, 6):
            assert abs(box_spectrum(tilt, w)) < 1e-12
        assert abs(box_spectrum(tilt, 1)) > 0.5

    def test_gaussian_fit_error_grows_with_tilt(self):
        # a narrow box is nearly flat over the kernel passband, so the
        # Gaussian fit degrades as the tilt (and hence the sinc dip) grows
        e5 = gaussian_fit_error(5.0)
        e90 = gaussian_fit_error(90.0)
        assert e5 < e90
        assert e90 == pytest.approx(0.226, abs=0.02)  # regression value


class TestModeCounting:
    def test_two_clean_bumps(self):
        theta = -180.0 + 360.0 * np.arange(1440) / 1440
        f = np.exp(-((theta / 20.0) ** 2)) + 0.7 * np.exp(-(((theta - 150.0) / 15.0) ** 2))
        assert count_modes_1d(f) == 2

    def test_constant_counts_one(self):
        assert count_modes_1d(np.ones(720)) == 1

    def test_merge_radius(self):
        theta = -180.0 + 360.0 * np.arange(1440) / 1440
        f = np.exp(-((theta / 30.0) ** 2)) + np.exp(-(((theta - 3.0) / 30.0) ** 2))
        assert count_modes_1d(f, merge_deg=5.0) == 1

    def test_blur_never_raises_mode_count(self):
        for seed in range(30):
            L = profile_corpus_radiance(seed)
            base = blur_profile(make_profile(L, 5.0))
            wide = blur_profile(make_profile(L, 90.0))
            assert count_modes_1d(wide.blurred) <= count_modes_1d(base.blurred)

    def test_quarter_turn_blur_is_unimodal(self):
        for seed in range(30):
            L = profile_corpus_radiance(seed)
            p = blur_profile(make_profile(L, 90.0))
            assert count_modes_1d(p.blurred) == 1

    def test_positions_are_peaks(self):
        L = profile_corpus_radiance(8)
        p = blur_profile(make_profile(L, 30.0))
        n = len(L)
        for idx in mode_positions_1d(p.blurred):
            assert p.blurred[idx] >= p.blurred[(idx - 1) % n]
            assert p.blurred[idx] >= p.blurred[(idx + 1) % n]

    def test_no_new_modes_on_corpus_sample(self):
        for seed in range(30):
            L = profile_corpus_radiance(seed)
            for tilt in (5.0, 45.0, 90.0):
                p = blur_profile(make_profile(L, tilt))
                assert new_mode_count(p) == 0


class TestClippedCosine:
    def test_support_is_half_circle(self):
        theta = np.array([-120.0, -90.0, 0.0, 45.0, 90.0, 150.0])
        k = clipped_cosine(theta)
        assert k[0] == 0.0 and k[-1] == 0.0
        assert k[2] == pytest.approx(1.0)
        assert k[3] == pytest.approx(np.cos(np.deg2rad(45.0)))
