import numpy as np
import pytest

from kickedatom.constants import HBAR, RB85_MASS
from kickedatom.ensemble import Binning, MomentumDistribution
from kickedatom.imaging import (
    AnalysisConfig,
    GridMismatchError,
    SpatialProfile,
    delta_p_max,
    delta_p_max_detail,
    smooth,
    tof_project,
)
from kickedatom.units import rb85_params

RECOIL = HBAR * rb85_params(250e-9, 7.24, 6).laser_wavenumber


def single_momentum_dist(p_recoil, binning=Binning(halfwidth=160.0)):
    centers = binning.centers()
    dens = np.zeros_like(centers)
    dens[np.argmin(np.abs(centers - p_recoil))] = 1.0
    return MomentumDistribution(centers, dens, binning.bin_width)


def make_profile(densities, dx=1e-5, t_tof=9.9e-3):
    n = len(densities)
    x = dx * (np.arange(n) - n // 2)
    return SpatialProfile(x, np.asarray(densities, float), t_tof, RB85_MASS, RECOIL)


class TestTofProject:
    def test_point_source_single_momentum(self):
        # frozen: 1 recoil travels 5.9627e-5 m in 9.9 ms for Rb85
        dist = single_momentum_dist(20.0)
        prof = tof_project(dist, 3e-4, 9.9e-3, RB85_MASS, RECOIL)
        x_c = prof.positions[np.argmax(prof.densities)]
        assert prof.x_per_recoil == pytest.approx(5.962730197532738e-05, rel=1e-12)
        assert x_c == pytest.approx(20.0 * prof.x_per_recoil, abs=prof.dx)
        # Gaussian of width sigma: compare second moment
        mass = prof.densities * prof.dx
        mean = np.sum(mass * prof.positions)
        var = np.sum(mass * (prof.positions - mean) ** 2)
        assert np.sqrt(var) == pytest.approx(3e-4, rel=0.01)

    def test_zero_sigma_pure_rescaling(self):
        dist = single_momentum_dist(-12.5)
        prof = tof_project(dist, 0.0, 9.9e-3, RB85_MASS, RECOIL)
        assert prof.positions.size == dist.centers.size
        k = np.argmax(prof.densities)
        assert prof.momentum_axis()[k] == pytest.approx(-12.5, abs=dist.bin_width)

    def test_mass_conserved(self):
        rng = np.random.default_rng(1)
        binning = Binning(halfwidth=80.0)
        dens = rng.random(binning.centers().size)
        dist = MomentumDistribution(binning.centers(), dens / dens.sum(), binning.bin_width)
        prof = tof_project(dist, 6e-4, 9.9e-3, RB85_MASS, RECOIL)
        assert prof.total_mass == pytest.approx(1.0, abs=1e-9)

    def test_rejects_bad_tof(self):
        with pytest.raises(ValueError):
            tof_project(single_momentum_dist(0.0), 1e-4, 0.0, RB85_MASS, RECOIL)


class TestSmooth:
    def test_constant_profile_unchanged(self):
        prof = make_profile(np.full(101, 3.7))
        out = smooth(prof, AnalysisConfig(smoothing_span=4.0, smoothing_passes=5))
        assert np.allclose(out.densities, 3.7, rtol=1e-14)

    def test_single_delta_one_pass_becomes_box(self):
        # span of 5 bins: delta -> rectangle of height 1/5 over 5 bins
        binning = Binning(bin_width=1.0, halfwidth=20.0)
        centers = binning.centers()
        dens = np.zeros_like(centers)
        dens[20] = 1.0
        dist = MomentumDistribution(centers, dens, 1.0)
        out = smooth(dist, AnalysisConfig(smoothing_span=5.0, smoothing_passes=1))
        assert np.allclose(out.densities[18:23], 0.2, rtol=1e-12)
        assert out.densities[17] == 0.0 and out.densities[23] == 0.0

    def test_linear_ramp_interior_unchanged(self):
        y = np.linspace(0.0, 1.0, 41)
        prof = make_profile(y)
        cfg = AnalysisConfig(smoothing_span=4.0, smoothing_passes=1)
        out = smooth(prof, cfg)
        span = int(round(4.0 / (prof.dx / prof.x_per_recoil)))
        half = (span if span % 2 else span - 1) // 2
        assert np.allclose(out.densities[half:-half], y[half:-half], rtol=1e-12)

    def test_mass_conserved_on_padded_profiles(self):
        rng = np.random.default_rng(2)
        y = np.zeros(301)
        y[100:200] = rng.random(100)
        prof = make_profile(y)
        out = smooth(prof, AnalysisConfig(smoothing_span=4.0, smoothing_passes=5))
        assert out.total_mass == pytest.approx(prof.total_mass, abs=1e-12 * prof.total_mass + 1e-15)

    def test_linear_operator(self):
        cfg = AnalysisConfig(smoothing_span=4.0, smoothing_passes=3)
        rng = np.random.default_rng(3)
        y1, y2 = rng.random(80), rng.random(80)
        s1 = smooth(make_profile(y1), cfg).densities
        s2 = smooth(make_profile(y2), cfg).densities
        s12 = smooth(make_profile(y1 + 2 * y2), cfg).densities
        assert np.allclose(s12, s1 + 2 * s2, rtol=1e-12)


def shoulder_profiles(width_recoil, height_factor=10.0, threshold=1e-4):
    """Reference plus a box difference of given full width (recoils)."""
    binning = Binning(halfwidth=320.0)
    centers = binning.centers()
    base = np.exp(-0.5 * (centers / 4.0) ** 2)
    base /= base.sum()
    box = np.where(np.abs(centers) <= width_recoil / 2.0, height_factor * threshold * binning.bin_width, 0.0)
    ref = MomentumDistribution(centers, base, binning.bin_width)
    with_sw = MomentumDistribution(centers, (base + box) / (base + box).sum(), binning.bin_width)
    sigma = 1e-5  # nearly point source so the box edges stay sharp
    prof_ref = tof_project(ref, sigma, 9.9e-3, RB85_MASS, RECOIL)
    prof_sw = tof_project(with_sw, sigma, 9.9e-3, RB85_MASS, RECOIL)
    return prof_sw, prof_ref


class TestDeltaPMax:
    def test_identical_profiles_give_zero(self):
        prof, _ = shoulder_profiles(100.0)
        assert delta_p_max(prof, prof, AnalysisConfig()) == 0.0

    def test_box_difference_width(self):
        # minimal smoothing so the box edges stay put: reads the box width
        cfg = AnalysisConfig(smoothing_span=0.5, smoothing_passes=1)
        prof_sw, prof_ref = shoulder_profiles(200.0, height_factor=10.0, threshold=cfg.threshold)
        dp = delta_p_max(prof_sw, prof_ref, cfg)
        assert dp == pytest.approx(200.0, abs=2.0 * 0.5)  # within a bin

    def test_box_difference_width_smoothed_bias_is_bounded(self):
        # default smoothing widens a 10x-threshold box by a few recoils only
        cfg = AnalysisConfig()
        prof_sw, prof_ref = shoulder_profiles(200.0, height_factor=10.0, threshold=cfg.threshold)
        dp = delta_p_max(prof_sw, prof_ref, cfg)
        assert 200.0 <= dp < 210.0

    def test_grid_mismatch_rejected(self):
        prof_sw, prof_ref = shoulder_profiles(100.0)
        shifted = SpatialProfile(
            prof_ref.positions + prof_ref.dx / 3.0,
            prof_ref.densities,
            prof_ref.t_tof,
            prof_ref.mass,
            prof_ref.recoil_momentum,
        )
        with pytest.raises(GridMismatchError):
            delta_p_max(prof_sw, shifted, AnalysisConfig())

    def test_monotone_under_pointwise_increase(self):
        cfg = AnalysisConfig()
        widths = [60.0, 120.0, 200.0]
        values = [delta_p_max(*shoulder_profiles(w), cfg) for w in widths]
        assert values[0] < values[1] < values[2]

    def test_never_above_threshold_gives_zero(self):
        cfg = AnalysisConfig()
        prof_sw, prof_ref = shoulder_profiles(100.0, height_factor=0.5)
        detail = delta_p_max_detail(prof_sw, prof_ref, cfg)
        assert detail["delta_p_max"] == 0.0
        assert not detail["found"]

    def test_invariant_under_grid_refinement(self):
        cfg = AnalysisConfig()
        coarse = delta_p_max(*shoulder_profiles(150.0), cfg)
        fine_binning = Binning(bin_width=0.25, halfwidth=320.0)
        centers = fine_binning.centers()
        base = np.exp(-0.5 * (centers / 4.0) ** 2)
        base /= base.sum()
        box = np.where(np.abs(centers) <= 75.0, 10.0 * cfg.threshold * fine_binning.bin_width, 0.0)
        ref = MomentumDistribution(centers, base, fine_binning.bin_width)
        sw = MomentumDistribution(centers, (base + box) / (base + box).sum(), fine_binning.bin_width)
        prof_ref = tof_project(ref, 1e-5, 9.9e-3, RB85_MASS, RECOIL)
        prof_sw = tof_project(sw, 1e-5, 9.9e-3, RB85_MASS, RECOIL)
        fine = delta_p_max(prof_sw, prof_ref, cfg)
        assert abs(fine - coarse) < 0.5  # one original bin width
