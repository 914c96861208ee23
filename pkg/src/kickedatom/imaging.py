"""Time-of-flight projection, smoothing, and momentum-width extraction.

The imaging model is 1D: each momentum class lands at x = p t_TOF / M after
time of flight, the point-source profile is convolved with the initial cloud,
and the maximum momentum difference is read off the smoothed
(with SW - without SW) difference curve at a fixed threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .ensemble import MomentumDistribution


class GridMismatchError(ValueError):
    """The two profiles of a difference curve live on different grids."""


@dataclass(frozen=True)
class AnalysisConfig:
    """Threshold and smoothing settings, held fixed across a study.

    threshold is a probability density per hbar k_L of momentum-equivalent
    position; the smoothing span is in hbar k_L as well. difference_first
    selects the default order (subtract, then smooth the difference).
    """

    threshold: float = 1e-4
    smoothing_span: float = 4.0
    smoothing_passes: int = 5
    difference_first: bool = True

    def __post_init__(self):
        if not self.threshold > 0.0:
            raise ValueError("threshold must be positive")
        if not self.smoothing_span > 0.0:
            raise ValueError("smoothing_span must be positive")
        if self.smoothing_passes < 1:
            raise ValueError("smoothing_passes must be >= 1")


@dataclass
class SpatialProfile:
    """Density profile on a uniform position grid after time of flight."""

    positions: np.ndarray
    densities: np.ndarray
    t_tof: float
    mass: float
    recoil_momentum: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        self.densities = np.asarray(self.densities, dtype=np.float64)
        if self.positions.shape != self.densities.shape or self.positions.size < 2:
            raise ValueError("positions/densities must be matching 1D grids")
        steps = np.diff(self.positions)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("position grid must be uniform")
        if np.any(self.densities < -1e-12):
            raise ValueError("densities must be nonnegative")

    @property
    def dx(self) -> float:
        return float(self.positions[1] - self.positions[0])

    @property
    def x_per_recoil(self) -> float:
        """Displacement after TOF of one photon recoil [m]."""
        return self.recoil_momentum * self.t_tof / self.mass

    @property
    def total_mass(self) -> float:
        return float(self.densities.sum() * self.dx)

    def momentum_axis(self) -> np.ndarray:
        """Positions converted to momentum via p = x M / t_TOF, in hbar k_L."""
        return self.positions / self.x_per_recoil


def tof_project(
    dist: MomentumDistribution,
    initial_sigma: float,
    t_tof: float,
    mass: float,
    recoil_momentum: float,
) -> SpatialProfile:
    """Project a momentum distribution to a TOF position profile.

    Each bin lands at x = p t_TOF / M; the point-source profile is then
    convolved with the Gaussian initial cloud of RMS width initial_sigma.
    Total probability is conserved (the kernel is renormalized after
    truncation at +-6 sigma).
    """
    if not t_tof > 0.0:
        raise ValueError("t_tof must be positive")
    if initial_sigma < 0.0:
        raise ValueError("initial_sigma must be >= 0")
    x_per_recoil = recoil_momentum * t_tof / mass
    dx = dist.bin_width * x_per_recoil
    positions = dist.centers * x_per_recoil
    mass_per_bin = dist.densities

    if initial_sigma > 0.25 * dx:
        half = int(math.ceil(6.0 * initial_sigma / dx))
        kx = np.arange(-half, half + 1) * dx
        kernel = np.exp(-0.5 * (kx / initial_sigma) ** 2)
        kernel /= kernel.sum()
        mass_out = np.convolve(mass_per_bin, kernel, mode="full")
        positions = np.arange(positions[0] - half * dx, positions[-1] + (half + 0.5) * dx, dx)[: mass_out.size]
    else:
        mass_out = mass_per_bin.copy()

    return SpatialProfile(
        positions=positions,
        densities=mass_out / dx,
        t_tof=t_tof,
        mass=mass,
        recoil_momentum=recoil_momentum,
        metadata={"initial_sigma": initial_sigma},
    )


def _moving_average(y: np.ndarray, span: int) -> np.ndarray:
    """Centered moving average with symmetric shrinking windows at the ends.

    Matches the classic default smoother: odd span, and near the boundaries
    the window shrinks symmetrically to the available samples.
    """
    n = y.size
    span = min(span, n if n % 2 == 1 else n - 1)
    if span % 2 == 0:
        span -= 1
    if span <= 1:
        return y.copy()
    half = span // 2
    csum = np.concatenate(([0.0], np.cumsum(y)))
    out = np.empty_like(y)
    idx = np.arange(half, n - half)
    out[idx] = (csum[idx + half + 1] - csum[idx - half]) / span
    for k in range(half):
        w = 2 * k + 1
        out[k] = (csum[2 * k + 1] - csum[0]) / w
        out[n - 1 - k] = (csum[n] - csum[n - 2 * k - 1]) / w
    return out


def _span_samples(span_recoil: float, spacing_recoil: float) -> int:
    if span_recoil < spacing_recoil:
        raise ValueError("smoothing span must be at least one grid spacing")
    return max(1, int(round(span_recoil / spacing_recoil)))


def smooth(obj, cfg: AnalysisConfig):
    """Apply the moving-average filter cfg.smoothing_passes times.

    Accepts a SpatialProfile or a MomentumDistribution and returns the same
    type. The span is interpreted in hbar k_L and converted to grid samples.
    """
    if isinstance(obj, SpatialProfile):
        spacing_recoil = obj.dx / obj.x_per_recoil
        span = _span_samples(cfg.smoothing_span, spacing_recoil)
        dens = obj.densities
        for _ in range(cfg.smoothing_passes):
            dens = _moving_average(dens, span)
        return SpatialProfile(
            positions=obj.positions.copy(),
            densities=np.clip(dens, 0.0, None),
            t_tof=obj.t_tof,
            mass=obj.mass,
            recoil_momentum=obj.recoil_momentum,
            metadata=dict(obj.metadata),
        )
    if isinstance(obj, MomentumDistribution):
        span = _span_samples(cfg.smoothing_span, obj.bin_width)
        dens = obj.densities
        for _ in range(cfg.smoothing_passes):
            dens = _moving_average(dens, span)
        return MomentumDistribution(centers=obj.centers.copy(), densities=np.clip(dens, 0.0, None), bin_width=obj.bin_width, normalized=False)
    raise TypeError(f"cannot smooth {type(obj)!r}")


def _smoothed_difference(with_sw: SpatialProfile, without_sw: SpatialProfile, cfg: AnalysisConfig):
    if with_sw.positions.shape != without_sw.positions.shape or not np.allclose(
        with_sw.positions, without_sw.positions, rtol=1e-12, atol=1e-15
    ):
        raise GridMismatchError("profiles live on different grids")
    spacing_recoil = with_sw.dx / with_sw.x_per_recoil
    span = _span_samples(cfg.smoothing_span, spacing_recoil)
    if cfg.difference_first:
        diff = with_sw.densities - without_sw.densities
        for _ in range(cfg.smoothing_passes):
            diff = _moving_average(diff, span)
    else:
        a, b = with_sw.densities, without_sw.densities
        for _ in range(cfg.smoothing_passes):
            a = _moving_average(a, span)
            b = _moving_average(b, span)
        diff = a - b
    return diff


def delta_p_max_detail(with_sw: SpatialProfile, without_sw: SpatialProfile, cfg: AnalysisConfig) -> dict:
    """Full record of one width extraction: crossings, threshold, curve.

    The threshold (per hbar k_L) is converted to a per-meter density; the
    outermost positions where the smoothed difference exceeds it are located
    on each side with linear interpolation and converted back to momentum.
    """
    diff = _smoothed_difference(with_sw, without_sw, cfg)
    x_per_recoil = with_sw.x_per_recoil
    thr = cfg.threshold / x_per_recoil
    above = np.nonzero(diff >= thr)[0]
    result = {
        "threshold_per_recoil": cfg.threshold,
        "smoothing_span_recoil": cfg.smoothing_span,
        "smoothing_passes": cfg.smoothing_passes,
        "difference": diff,
        "found": bool(above.size),
        "delta_p_max": 0.0,
        "crossings_recoil": None,
    }
    if not above.size:
        return result
    x = with_sw.positions

    def interp_edge(inner: int, outer: int) -> float:
        if outer < 0 or outer >= diff.size or diff[outer] >= thr:
            return x[inner]
        frac = (thr - diff[outer]) / (diff[inner] - diff[outer])
        return x[outer] + frac * (x[inner] - x[outer])

    left = interp_edge(above[0], above[0] - 1)
    right = interp_edge(above[-1], above[-1] + 1)
    p_left = left / x_per_recoil
    p_right = right / x_per_recoil
    result["delta_p_max"] = max(p_right - p_left, 0.0)
    result["crossings_recoil"] = (p_left, p_right)
    return result


def delta_p_max(with_sw: SpatialProfile, without_sw: SpatialProfile, cfg: AnalysisConfig) -> float:
    """Maximum momentum difference [hbar k_L] at the configured threshold."""
    return delta_p_max_detail(with_sw, without_sw, cfg)["delta_p_max"]
