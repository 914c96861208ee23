"""Thermal-gas layer: initial-condition sampling and aggregation to momentum distributions.

Quantum runs decompose every initial momentum of a Maxwell-Boltzmann weighted
grid into (ladder site, quasimomentum) and evolve each manifold; Monte-Carlo
runs sample trajectories directly. Both aggregate to a binned momentum
distribution in photon-recoil units (hbar k_L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import erf

from . import qsim
from .constants import HBAR, KB
from .pcl import PendulumIntegratorConfig, TrajectoryEnsemble, run_ensemble
from .units import PhysicalParams, derive_dimensionless


@dataclass(frozen=True)
class DepthVariation:
    """Distribution of the per-atom potential-depth multiplier.

    kind "none" returns the nominal depth. kind "spread" combines a
    shot-to-shot Gaussian factor (sigma = shot_sigma, mean 1) with a uniform
    spatial intensity factor in [1/spatial_factor, 1].
    """

    kind: str = "none"
    shot_sigma: float = 0.05
    spatial_factor: float = 2.0

    def __post_init__(self):
        if self.kind not in ("none", "spread"):
            raise ValueError(f"unknown depth variation kind {self.kind!r}")
        if self.spatial_factor < 1.0:
            raise ValueError("spatial_factor must be >= 1")


@dataclass(frozen=True)
class ThermalInit:
    """Initial thermal gas description.

    The quantum momentum grid is uniform with spacing grid_spacing (recoils)
    out to grid_halfwidth_sigmas thermal widths, symmetric about zero.
    spatial_sigma=None defers to PhysicalParams.initial_cloud_sigma.
    """

    temperature: float = 6.4e-6
    grid_spacing: float = 0.05
    grid_halfwidth_sigmas: float = 4.0
    spatial_sigma: Optional[float] = None
    depth_variation: DepthVariation = field(default_factory=DepthVariation)

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise ValueError("temperature must be positive")
        if not self.grid_spacing > 0.0:
            raise ValueError("grid_spacing must be positive")
        if not self.grid_halfwidth_sigmas > 0.0:
            raise ValueError("grid_halfwidth_sigmas must be positive")


@dataclass
class MomentumDistribution:
    """Binned momentum distribution: probability mass per bin, sum = 1."""

    centers: np.ndarray
    densities: np.ndarray
    bin_width: float
    normalized: bool = True

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=np.float64)
        self.densities = np.asarray(self.densities, dtype=np.float64)
        if self.centers.shape != self.densities.shape:
            raise ValueError("centers and densities must match")
        if np.any(self.densities < -1e-12):
            raise ValueError("densities must be nonnegative")
        if self.normalized and abs(self.densities.sum() - 1.0) > 1e-9:
            raise ValueError(f"distribution mass {self.densities.sum()!r} != 1")

    @property
    def total(self) -> float:
        return float(self.densities.sum())


@dataclass(frozen=True)
class Binning:
    """Uniform bins over [-halfwidth, halfwidth] in recoil units.

    Bin centers sit on multiples of bin_width (zero included), so the ladder
    momenta of integer-recoil manifolds fall on centers, never on edges.
    """

    bin_width: float = 0.5
    halfwidth: float = 320.0

    def edges(self) -> np.ndarray:
        n_side = int(round(self.halfwidth / self.bin_width))
        return self.bin_width * (np.arange(-n_side, n_side + 2) - 0.5)

    def centers(self) -> np.ndarray:
        n_side = int(round(self.halfwidth / self.bin_width))
        return self.bin_width * np.arange(-n_side, n_side + 1)


def thermal_sigma_recoil(p: PhysicalParams, temperature: float) -> float:
    """RMS of the 1D Maxwell-Boltzmann momentum distribution in hbar k_L."""
    return math.sqrt(p.atomic_mass * KB * temperature) / (HBAR * p.laser_wavenumber)


def momentum_grid(init: ThermalInit, p: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric initial-momentum grid (recoils) with renormalized MB weights."""
    sigma = thermal_sigma_recoil(p, init.temperature)
    n_half = int(math.ceil(init.grid_halfwidth_sigmas * sigma / init.grid_spacing))
    grid = init.grid_spacing * np.arange(-n_half, n_half + 1)
    w = np.exp(-0.5 * (grid / sigma) ** 2)
    return grid, w / w.sum()


def maxwell_boltzmann_distribution(init: ThermalInit, p: PhysicalParams, binning: Binning) -> MomentumDistribution:
    """Analytic MB reference binned exactly (erf over bin edges), renormalized."""
    sigma = thermal_sigma_recoil(p, init.temperature)
    edges = binning.edges()
    cdf = 0.5 * (1.0 + erf(edges / (sigma * math.sqrt(2.0))))
    mass = np.diff(cdf)
    return MomentumDistribution(binning.centers(), mass / mass.sum(), binning.bin_width)


def sample_potential_depth(nominal, variation: DepthVariation, rng: np.random.Generator, size: Optional[int] = None):
    """Per-atom potential depth samples; kind "none" returns the nominal exactly."""
    if variation.kind == "none":
        return nominal if size is None else np.full(size, nominal)
    return nominal * depth_multipliers(variation, rng, size if size is not None else 1)


def depth_multipliers(variation: DepthVariation, rng: np.random.Generator, size: int) -> np.ndarray:
    if variation.kind == "none":
        return np.ones(size)
    shot = rng.normal(1.0, variation.shot_sigma, size)
    spatial = rng.uniform(1.0 / variation.spatial_factor, 1.0, size)
    return np.clip(shot, 0.05, None) * spatial


@dataclass(frozen=True)
class QuantumPipelineConfig:
    """Fidelity knobs for the quantum thermal pipeline."""

    n_max: int = 160
    max_n_max: int = 1280
    propagator: qsim.PulsePropagatorConfig = field(default_factory=qsim.PulsePropagatorConfig)


@dataclass(frozen=True)
class PclPipelineConfig:
    """Fidelity knobs for the Monte-Carlo thermal pipeline."""

    trajectories: int = 100_000
    seed: int = 0
    threads: int = 1
    integrator: PendulumIntegratorConfig = field(default_factory=PendulumIntegratorConfig)


def suggested_ladder_halfwidth(p: PhysicalParams, model: str, init: ThermalInit, minimum: int = 160) -> int:
    """Estimate the ladder half-width needed to contain the final state.

    The pendulum bounds the momentum transfer of the finite-pulse models by
    roughly 2 N sqrt(v_tilde); the delta-kick model spreads by N phi_d sites.
    A generous guard margin is added; the truncation guard still backstops.
    """
    d = derive_dimensionless(p)
    n0_max = thermal_sigma_recoil(p, init.temperature) * init.grid_halfwidth_sigmas / 2.0
    if model == "delta":
        reach = p.pulse_count * d.phi_d + n0_max
    else:
        reach = (2.0 * p.pulse_count * math.sqrt(d.v_tilde) + abs(d.epsilon) * n0_max) / d.epsilon
    need = int(math.ceil(reach)) + 48
    return max(minimum, 32 * int(math.ceil(need / 32)))


def binning_for(p: PhysicalParams, models, init: ThermalInit, base: Binning = Binning()) -> Binning:
    """Binning wide enough for every requested model at these parameters."""
    half = base.halfwidth
    for model in models:
        n_need = suggested_ladder_halfwidth(p, "delta" if model == "delta" else "full", init)
        half = max(half, base.bin_width * math.ceil(2.0 * (n_need + 2) / base.bin_width))
    return Binning(bin_width=base.bin_width, halfwidth=half)


def _accumulate_ladder(hist, edges, p_recoil, mass):
    """Histogram ladder momenta; mass exactly on a bin edge is split half-half.

    Ladder momenta are rational multiples of the grid spacing and do land on
    edges; splitting keeps the aggregation mirror-symmetric and alias-free.
    """
    width = edges[1] - edges[0]
    t = (p_recoil - edges[0]) / width
    nearest = np.rint(t)
    on_edge = np.abs(t - nearest) < 1e-9

    def add(idx, m):
        ok = (idx >= 0) & (idx < hist.size)
        np.add.at(hist, idx[ok], m[ok])

    add(np.floor(t[~on_edge]).astype(int), mass[~on_edge])
    k = nearest[on_edge].astype(int)
    add(k - 1, mass[on_edge] / 2.0)
    add(k, mass[on_edge] / 2.0)


def thermal_quantum_distribution(
    init: ThermalInit,
    p: PhysicalParams,
    model: str = "full",
    cfg: Optional[QuantumPipelineConfig] = None,
    binning: Optional[Binning] = None,
    period: Optional[float] = None,
    n_pulses: Optional[int] = None,
) -> MomentumDistribution:
    """Maxwell-Boltzmann averaged momentum distribution from the quantum models.

    Every grid momentum is decomposed as p / hbar K = n0 + beta; manifolds
    sharing beta reuse one pulse propagator and evolve all their initial sites
    as one column batch. model is "full" or "delta"; a non-None period selects
    the general (off-resonant) free flight of the full model. The ladder
    half-width auto-escalates when the truncation guard trips.
    """
    if model not in ("full", "delta"):
        raise ValueError(f"unknown quantum model {model!r}")
    cfg = cfg or QuantumPipelineConfig()
    binning = binning or binning_for(p, [model], init)
    n_pulses = p.pulse_count if n_pulses is None else n_pulses

    grid, weights = momentum_grid(init, p)
    p_over_hk = grid / 2.0
    n0 = np.floor(p_over_hk).astype(int)
    beta = np.round(p_over_hk - n0, 12)
    d0 = derive_dimensionless(p)

    edges = binning.edges()
    hist = np.zeros(edges.size - 1)

    n_max = max(cfg.n_max, suggested_ladder_halfwidth(p, model, init, minimum=cfg.n_max))
    for b in np.unique(beta):
        sel = np.nonzero(beta == b)[0]
        sites = n0[sel]
        w = weights[sel]
        current = n_max
        while True:
            try:
                pops = _evolve_manifold_batch(d0, p, float(b), sites, current, model, cfg, period, n_pulses)
                break
            except qsim.TruncationError:
                current *= 2
                if current > cfg.max_n_max:
                    raise
        n_values = np.arange(-current, current + 1)
        p_out = 2.0 * (n_values + float(b))
        _accumulate_ladder(hist, edges, np.tile(p_out, sites.size), (pops * w).T.ravel())

    total = hist.sum()
    if total < 1.0 - 1e-6:
        raise RuntimeError(f"binning lost {1.0 - total:.2e} of the distribution mass")
    return MomentumDistribution(binning.centers(), hist / total, binning.bin_width)


def _evolve_manifold_batch(d0, p, beta, sites, n_max, model, cfg, period, n_pulses):
    """Populations (ladder, site) after n_pulses for all initial sites of one beta."""
    dim = 2 * n_max + 1
    psi = np.zeros((dim, sites.size), dtype=np.complex128)
    psi[sites + n_max, np.arange(sites.size)] = 1.0
    prop = qsim.get_propagator(d0.epsilon, d0.v_tilde, beta, n_max)
    if model == "delta":
        grating = qsim.get_grating(n_max)
        free = prop.delta_kick_free_phases(p.resonance_order)
        for _ in range(n_pulses):
            psi = grating.apply(psi, d0.phi_d)
            psi *= free[:, None]
    else:
        if period is None:
            free = prop.free_phases(p.resonance_order)
        else:
            free = prop.general_period_phases(period, p.pulse_duration)
        for _ in range(n_pulses):
            psi = prop.apply_pulse(psi)
            psi *= free[:, None]
    pops = np.abs(psi) ** 2
    guard = pops[: qsim.TRUNCATION_GUARD_SITES].sum(axis=0) + pops[-qsim.TRUNCATION_GUARD_SITES :].sum(axis=0)
    if n_pulses > 0 and np.any(guard >= qsim.TRUNCATION_GUARD_TOL):
        raise qsim.TruncationError(f"boundary population {guard.max():.2e} at n_max={n_max}")
    return pops


def thermal_pcl_distribution(
    init: ThermalInit,
    p: PhysicalParams,
    cfg: Optional[PclPipelineConfig] = None,
    binning: Optional[Binning] = None,
    n_pulses: Optional[int] = None,
    capture: Optional[dict] = None,
) -> MomentumDistribution:
    """Momentum distribution from the pseudoclassical Monte-Carlo model.

    Atoms are sampled from the MB momentum distribution and a uniform angle
    over the standing-wave period; each carries its quasimomentum (fractional
    part of p / hbar K) into the free map and, optionally, a potential-depth
    multiplier. Final scaled momenta map back to recoils via p = 2 J / epsilon.
    A non-None capture dict receives the final ensemble arrays (debug export).
    """
    cfg = cfg or PclPipelineConfig()
    binning = binning or binning_for(p, ["pseudoclassical"], init)
    n_pulses = p.pulse_count if n_pulses is None else n_pulses
    d0 = derive_dimensionless(p)

    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    sigma = thermal_sigma_recoil(p, init.temperature)
    p0 = rng.normal(0.0, sigma, cfg.trajectories)
    thetas = rng.uniform(0.0, 2.0 * math.pi, cfg.trajectories)
    multipliers = None
    if init.depth_variation.kind != "none":
        multipliers = depth_multipliers(init.depth_variation, rng, cfg.trajectories)

    p_over_hk = p0 / 2.0
    betas = np.mod(p_over_hk, 1.0)
    ens = TrajectoryEnsemble(
        thetas=thetas,
        js=p_over_hk * d0.epsilon,
        beta=betas,
        rng_seed=cfg.seed,
    )
    out, _ = run_ensemble(ens, d0, "pseudoclassical", n_pulses, cfg.integrator,
                          threads=cfg.threads, v_tilde_multipliers=multipliers)

    p_final = 2.0 * out.js / d0.epsilon
    if capture is not None:
        capture.update(thetas=out.thetas, js=out.js, beta=betas, seed=cfg.seed)
    hist, _ = np.histogram(p_final, bins=binning.edges())
    mass = hist.astype(np.float64)
    total = mass.sum()
    if total < cfg.trajectories * (1.0 - 1e-6):
        raise RuntimeError("binning lost more than 1e-6 of the trajectories")
    return MomentumDistribution(binning.centers(), mass / total, binning.bin_width)
