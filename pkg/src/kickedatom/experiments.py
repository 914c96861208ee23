"""Experiment orchestration: declarative configs, sweeps, result tables.

Each experiment kind (compare-models, sweep-tp, scaling, scan-period,
distribution) is driven by one JSON-serializable config and produces a
ScanResult whose rows are fully determined by (config, seed): sweep points
are scheduled in config order, per-point seeds derive from the base seed and
the point index, and reductions are ordered, so reruns are bit-identical for
any thread count.
"""

from __future__ import annotations

import hashlib
import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import numpy as np

from . import __version__
from .constants import PLANCK_H
from .ensemble import (
    Binning,
    DepthVariation,
    PclPipelineConfig,
    QuantumPipelineConfig,
    ThermalInit,
    binning_for,
    maxwell_boltzmann_distribution,
    thermal_pcl_distribution,
    thermal_quantum_distribution,
)
from .imaging import AnalysisConfig, SpatialProfile, delta_p_max_detail, tof_project
from .pcl import PendulumIntegratorConfig, run_ensemble, uniform_theta_ensemble
from .qsim import TruncationError, delta_kick_step, energy, floquet_step, plane_wave
from .units import (
    PhysicalParams,
    derive_dimensionless,
    pulse_duration_for_nv,
    rb85_params,
    rb85_params_for_dimensionless,
    scale_deltap,
    talbot_time,
)

KINDS = ("compare-models", "sweep-tp", "scaling", "scan-period", "distribution")

QUANTUM_MODELS = {"full-quantum": "full", "delta-kick": "delta"}
ALL_MODELS = ("full-quantum", "delta-kick", "pseudoclassical", "classical")


class ModelValidityWarning(UserWarning):
    """Parameters enter the regime where models and experiment disagreed."""


@dataclass(frozen=True)
class FidelityConfig:
    """Resolution knobs; defaults complete each figure in minutes on a desktop."""

    trajectories: int = 100_000
    substeps: int = 24
    compare_trajectories: int = 20_000
    compare_beta_points: int = 48
    inset_trajectories: int = 20_000
    inset_substeps: int = 8
    ladder_halfwidth: int = 160


@dataclass
class ExperimentConfig:
    """One experiment: base parameters, swept variables, fidelity, seed."""

    kind: str
    physical: PhysicalParams
    thermal: ThermalInit = field(default_factory=ThermalInit)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    models: tuple = ("pseudoclassical",)
    sweep: dict = field(default_factory=dict)
    fidelity: FidelityConfig = field(default_factory=FidelityConfig)
    seed: int = 12345

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        for m in self.models:
            if m not in ALL_MODELS:
                raise ValueError(f"unknown model {m!r}")

    def to_dict(self) -> dict:
        phys = self.physical
        return {
            "kind": self.kind,
            "seed": self.seed,
            "physical": {
                "atomic_mass_kg": phys.atomic_mass,
                "laser_wavenumber_rad_m": phys.laser_wavenumber,
                "pulse_duration_s": phys.pulse_duration,
                "potential_depth_j": phys.potential_depth,
                "pulse_count": phys.pulse_count,
                "pulse_period_s": phys.pulse_period,
                "resonance_order": phys.resonance_order,
                "cloud_temperature_k": phys.cloud_temperature,
                "initial_cloud_sigma_m": phys.initial_cloud_sigma,
                "tof_duration_s": phys.tof_duration,
            },
            "thermal": {
                "temperature_k": self.thermal.temperature,
                "grid_spacing_recoil": self.thermal.grid_spacing,
                "grid_halfwidth_sigmas": self.thermal.grid_halfwidth_sigmas,
                "spatial_sigma_m": self.thermal.spatial_sigma,
                "depth_variation": {
                    "kind": self.thermal.depth_variation.kind,
                    "shot_sigma": self.thermal.depth_variation.shot_sigma,
                    "spatial_factor": self.thermal.depth_variation.spatial_factor,
                },
            },
            "analysis": {
                "threshold_per_recoil": self.analysis.threshold,
                "smoothing_span_recoil": self.analysis.smoothing_span,
                "smoothing_passes": self.analysis.smoothing_passes,
                "difference_first": self.analysis.difference_first,
            },
            "models": list(self.models),
            "sweep": self.sweep,
            "fidelity": {
                "trajectories": self.fidelity.trajectories,
                "substeps": self.fidelity.substeps,
                "compare_trajectories": self.fidelity.compare_trajectories,
                "compare_beta_points": self.fidelity.compare_beta_points,
                "inset_trajectories": self.fidelity.inset_trajectories,
                "inset_substeps": self.fidelity.inset_substeps,
                "ladder_halfwidth": self.fidelity.ladder_halfwidth,
            },
        }


def config_hash(cfg: ExperimentConfig) -> str:
    canon = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from its JSON form (the inverse of to_dict).

    Physical parameters accept either explicit SI values or the rb85
    shorthand {pulse_duration_s, potential_depth_h_mhz, pulse_count, ...}.
    """
    phys_raw = dict(raw.get("physical", {}))
    if "atomic_mass_kg" in phys_raw:
        phys = PhysicalParams(
            atomic_mass=phys_raw["atomic_mass_kg"],
            laser_wavenumber=phys_raw["laser_wavenumber_rad_m"],
            pulse_duration=phys_raw["pulse_duration_s"],
            potential_depth=phys_raw["potential_depth_j"],
            pulse_count=phys_raw["pulse_count"],
            pulse_period=phys_raw["pulse_period_s"],
            resonance_order=phys_raw.get("resonance_order", 1),
            cloud_temperature=phys_raw.get("cloud_temperature_k", 6.4e-6),
            initial_cloud_sigma=phys_raw.get("initial_cloud_sigma_m", 5.0e-4),
            tof_duration=phys_raw.get("tof_duration_s", 9.9e-3),
        )
    else:
        phys = rb85_params(
            pulse_duration=phys_raw["pulse_duration_s"],
            depth_over_h_mhz=phys_raw["potential_depth_h_mhz"],
            pulse_count=phys_raw["pulse_count"],
            resonance_order=phys_raw.get("resonance_order", 1),
            pulse_period=phys_raw.get("pulse_period_s"),
            cloud_temperature=phys_raw.get("cloud_temperature_k", 6.4e-6),
            initial_cloud_sigma=phys_raw.get("initial_cloud_sigma_m", 5.0e-4),
            tof_duration=phys_raw.get("tof_duration_s", 9.9e-3),
        )
    th_raw = raw.get("thermal", {})
    dv_raw = th_raw.get("depth_variation", {})
    thermal = ThermalInit(
        temperature=th_raw.get("temperature_k", phys.cloud_temperature),
        grid_spacing=th_raw.get("grid_spacing_recoil", 0.05),
        grid_halfwidth_sigmas=th_raw.get("grid_halfwidth_sigmas", 4.0),
        spatial_sigma=th_raw.get("spatial_sigma_m"),
        depth_variation=DepthVariation(
            kind=dv_raw.get("kind", "none"),
            shot_sigma=dv_raw.get("shot_sigma", 0.05),
            spatial_factor=dv_raw.get("spatial_factor", 2.0),
        ),
    )
    an_raw = raw.get("analysis", {})
    analysis = AnalysisConfig(
        threshold=an_raw.get("threshold_per_recoil", 1e-4),
        smoothing_span=an_raw.get("smoothing_span_recoil", 4.0),
        smoothing_passes=an_raw.get("smoothing_passes", 5),
        difference_first=an_raw.get("difference_first", True),
    )
    fid_raw = raw.get("fidelity", {})
    fidelity = FidelityConfig(
        trajectories=fid_raw.get("trajectories", 100_000),
        substeps=fid_raw.get("substeps", 24),
        compare_trajectories=fid_raw.get("compare_trajectories", 20_000),
        compare_beta_points=fid_raw.get("compare_beta_points", 48),
        inset_trajectories=fid_raw.get("inset_trajectories", 20_000),
        inset_substeps=fid_raw.get("inset_substeps", 8),
        ladder_halfwidth=fid_raw.get("ladder_halfwidth", 160),
    )
    return ExperimentConfig(
        kind=raw["kind"],
        physical=phys,
        thermal=thermal,
        analysis=analysis,
        models=tuple(raw.get("models", ["pseudoclassical"])),
        sweep=dict(raw.get("sweep", {})),
        fidelity=fidelity,
        seed=raw.get("seed", 12345),
    )


def default_config(kind: str) -> ExperimentConfig:
    """Paper-parameter defaults for each figure-level experiment."""
    if kind == "compare-models":
        # epsilon = 0.1, v_tilde = 1 model comparison grid
        return ExperimentConfig(
            kind=kind,
            physical=rb85_params_for_dimensionless(0.1, 1.0, pulse_count=15),
            models=ALL_MODELS,
            sweep={"max_pulses": 15},
        )
    if kind == "sweep-tp":
        # N = 6, V_d/h = 7.24 MHz, pulse duration scanned
        return ExperimentConfig(
            kind=kind,
            physical=rb85_params(250e-9, 7.24, pulse_count=6),
            models=("delta-kick", "full-quantum", "pseudoclassical"),
            sweep={"pulse_durations_s": [round(t, 12) for t in np.linspace(50e-9, 2e-6, 14)]},
        )
    if kind == "scaling":
        return ExperimentConfig(
            kind=kind,
            physical=rb85_params(430e-9, 7.24, pulse_count=6),
            models=("pseudoclassical",),
            sweep={
                "series": [
                    {"pulse_count": 6, "potential_depth_h_mhz": 7.24},
                    {"pulse_count": 9, "potential_depth_h_mhz": 6.64},
                    {"pulse_count": 10, "potential_depth_h_mhz": 3.47},
                    {"pulse_count": 14, "potential_depth_h_mhz": 2.57},
                ],
                "nv_values": [round(x, 6) for x in np.linspace(0.5, 12.0, 18)],
                "inset_series": [
                    {"pulse_count": 10, "potential_depth_h_mhz": 18.5},
                    {"pulse_count": 50, "potential_depth_h_mhz": 3.7},
                    {"pulse_count": 100, "potential_depth_h_mhz": 0.62},
                ],
                "inset_nv_values": [round(x, 6) for x in np.linspace(0.5, 12.0, 20)],
            },
        )
    if kind == "scan-period":
        # N = 10, V_d/h = 5.89 MHz Talbot-time scan
        return ExperimentConfig(
            kind=kind,
            physical=rb85_params(430e-9, 5.89, pulse_count=10),
            models=("full-quantum",),
            sweep={
                "pulse_durations_s": [180e-9, 430e-9, 650e-9],
                "period_halfwindow_s": 3e-6,
                "period_step_s": 50e-9,
            },
        )
    if kind == "distribution":
        # N = 6, t_p = 250 ns, V_d/h = 7.24 MHz momentum distribution
        return ExperimentConfig(
            kind=kind,
            physical=rb85_params(250e-9, 7.24, pulse_count=6),
            models=("pseudoclassical", "full-quantum"),
            sweep={},
        )
    raise ValueError(f"unknown experiment kind {kind!r}")


@dataclass
class ScanResult:
    """Result table plus reproducibility provenance.

    One row per swept point; failed points keep their row with status set to
    the error message and observables set to NaN.
    """

    kind: str
    columns: list
    rows: list
    provenance: dict
    extras: dict = field(default_factory=dict)

    @property
    def failed_rows(self) -> list:
        return [r for r in self.rows if r.get("status", "ok") != "ok"]

    def column(self, name, where=None) -> np.ndarray:
        vals = [r[name] for r in self.rows if where is None or where(r)]
        return np.asarray(vals)


def _provenance(cfg: ExperimentConfig) -> dict:
    return {
        "config": cfg.to_dict(),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "code_version": __version__,
    }


def _point_seed(base_seed: int, index: int) -> int:
    return (base_seed * 1_000_003 + index) % (2**63)


def _check_validity_guard(p: PhysicalParams):
    if p.pulse_duration > 2e-6 and p.depth_over_h > 7e6 and p.pulse_count > 12:
        warnings.warn(
            "t_p > 2 us, V_d/h > 7 MHz and N > 12: entering the regime where "
            "significant discrepancies between the models and experiment were observed",
            ModelValidityWarning,
            stacklevel=3,
        )


def _run_points(points, worker, threads):
    """Evaluate sweep points, preserving config order; capture per-point errors."""
    results = [None] * len(points)

    def run_one(i):
        t0 = time.perf_counter()
        try:
            payload = worker(i, points[i])
            return {"status": "ok", "payload": payload, "runtime_s": time.perf_counter() - t0}
        except Exception as exc:  # recorded, not raised: no silent gaps
            return {"status": f"error: {exc}", "payload": None, "runtime_s": time.perf_counter() - t0}

    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, res in enumerate(pool.map(run_one, range(len(points)))):
                results[i] = res
    else:
        for i in range(len(points)):
            results[i] = run_one(i)
    return results


# ---------------------------------------------------------------------------
# shared distribution -> dP_max evaluation


def _reference_profile(init: ThermalInit, p: PhysicalParams, binning: Binning) -> SpatialProfile:
    sigma0 = init.spatial_sigma if init.spatial_sigma is not None else p.initial_cloud_sigma
    ref = maxwell_boltzmann_distribution(init, p, binning)
    return tof_project(ref, sigma0, p.tof_duration, p.atomic_mass, p.recoil_momentum)


def _model_distribution(model, init, p, cfg: ExperimentConfig, binning, seed, period=None, capture=None):
    if model == "pseudoclassical":
        pcl_cfg = PclPipelineConfig(
            trajectories=cfg.fidelity.trajectories,
            seed=seed,
            integrator=PendulumIntegratorConfig(cfg.fidelity.substeps),
        )
        return thermal_pcl_distribution(init, p, pcl_cfg, binning=binning, capture=capture)
    if model in QUANTUM_MODELS:
        qcfg = QuantumPipelineConfig(n_max=cfg.fidelity.ladder_halfwidth)
        return thermal_quantum_distribution(
            init, p, QUANTUM_MODELS[model], cfg=qcfg, binning=binning, period=period
        )
    raise ValueError(f"model {model!r} has no thermal distribution pipeline")


def _dpmax_for_models(cfg, p, models, seed, period=None, collect=None, capture_ensembles=False):
    """dP_max per model at one sweep point; models share binning and reference."""
    init = cfg.thermal
    binning = binning_for(p, [QUANTUM_MODELS.get(m, m) for m in models], init)
    prof_ref = _reference_profile(init, p, binning)
    sigma0 = init.spatial_sigma if init.spatial_sigma is not None else p.initial_cloud_sigma
    out = {}
    for model in models:
        capture = {} if capture_ensembles and model == "pseudoclassical" else None
        dist = _model_distribution(model, init, p, cfg, binning, seed, period=period, capture=capture)
        prof = tof_project(dist, sigma0, p.tof_duration, p.atomic_mass, p.recoil_momentum)
        detail = delta_p_max_detail(prof, prof_ref, cfg.analysis)
        out[model] = detail["delta_p_max"]
        if collect is not None:
            collect[model] = {"distribution": dist, "profile": prof, "detail": detail,
                              "reference_profile": prof_ref}
            if capture:
                collect[model]["ensemble"] = capture
    return out


# ---------------------------------------------------------------------------
# experiment kinds


def _manifold_energy_trace(d, n_pulses, step, n_max, max_n_max=2560):
    """Energy after 0..n_pulses periods, doubling the ladder if the guard trips."""
    while True:
        try:
            s = plane_wave(0, d.beta, d.epsilon, n_max=n_max)
            trace = [energy(s)]
            for _ in range(n_pulses):
                s = step(s, d)
                trace.append(energy(s))
            return trace
        except TruncationError:
            n_max *= 2
            if n_max > max_n_max:
                raise


def compare_models(cfg: ExperimentConfig, threads: int = 1) -> ScanResult:
    """Energy <J^2/2> over the (pulse count, quasimomentum) grid for all models."""
    if cfg.kind != "compare-models":
        raise ValueError("config kind mismatch")
    d_base = derive_dimensionless(cfg.physical)
    n_max_pulses = int(cfg.sweep.get("max_pulses", 15))
    n_beta = int(cfg.sweep.get("beta_points", cfg.fidelity.compare_beta_points))
    betas = np.arange(n_beta) / n_beta
    _check_validity_guard(cfg.physical)

    def worker(i, beta):
        d = d_base.with_beta(float(beta))
        traces = {}
        traces["full-quantum"] = _manifold_energy_trace(
            d, n_max_pulses, floquet_step, cfg.fidelity.ladder_halfwidth
        )
        traces["delta-kick"] = _manifold_energy_trace(
            d, n_max_pulses, delta_kick_step, cfg.fidelity.ladder_halfwidth
        )
        for model in ("pseudoclassical", "classical"):
            ens = uniform_theta_ensemble(
                cfg.fidelity.compare_trajectories, d.beta, d.epsilon, seed=_point_seed(cfg.seed, i)
            )
            _, trace = run_ensemble(ens, d, model, n_max_pulses)
            traces[model] = trace
        return traces

    results = _run_points(list(betas), worker, threads)
    columns = ["n_pulses", "beta", "energy_full_quantum", "energy_delta_kick",
               "energy_pseudoclassical", "energy_classical", "runtime_s", "status"]
    rows = []
    for beta, res in zip(betas, results):
        for n in range(n_max_pulses + 1):
            row = {"n_pulses": n, "beta": float(beta), "runtime_s": res["runtime_s"], "status": res["status"]}
            for model in ALL_MODELS:
                key = "energy_" + model.replace("-", "_")
                row[key] = float(res["payload"][model][n]) if res["payload"] else float("nan")
            rows.append(row)
    return ScanResult("compare-models", columns, rows, _provenance(cfg))


def sweep_tp(cfg: ExperimentConfig, threads: int = 1, emit_intermediates: bool = False) -> ScanResult:
    """dP_max versus pulse duration for the selected models (fixed N, V_d)."""
    if cfg.kind != "sweep-tp":
        raise ValueError("config kind mismatch")
    tps = [float(t) for t in cfg.sweep["pulse_durations_s"]]
    extras = {}

    def worker(i, tp):
        p = cfg.physical.with_pulse_duration(tp)
        _check_validity_guard(p)
        collect = {} if emit_intermediates else None
        vals = _dpmax_for_models(cfg, p, cfg.models, _point_seed(cfg.seed, i), collect=collect)
        if collect is not None:
            extras[f"point_{i:03d}"] = collect
        return vals

    results = _run_points(tps, worker, threads)
    columns = ["t_p_s", "epsilon"] + [f"dp_max_{m.replace('-', '_')}" for m in cfg.models] + ["runtime_s", "status"]
    rows = []
    for tp, res in zip(tps, results):
        try:
            eps = derive_dimensionless(cfg.physical.with_pulse_duration(tp)).epsilon
        except ValueError:
            eps = float("nan")
        row = {"t_p_s": tp, "epsilon": eps,
               "runtime_s": res["runtime_s"], "status": res["status"]}
        for m in cfg.models:
            row[f"dp_max_{m.replace('-', '_')}"] = float(res["payload"][m]) if res["payload"] else float("nan")
        rows.append(row)
    result = ScanResult("sweep-tp", columns, rows, _provenance(cfg), extras)

    if "delta-kick" in cfg.models:
        ok = [(r["t_p_s"], r["dp_max_delta_kick"]) for r in rows if r["status"] == "ok"]
        if len(ok) >= 2:
            x, y = np.array(ok).T
            slope, intercept = np.polyfit(x, y, 1)
            result.provenance["delta_kick_linear_fit"] = {
                "slope_recoil_per_s": float(slope),
                "intercept_recoil": float(intercept),
            }
    return result


def scaling_curve(cfg: ExperimentConfig, threads: int = 1) -> ScanResult:
    """Scaling-law collapse: thermal dP_max series plus the beta = 0 inset.

    Main-curve points sweep t_p through a shared N v_tilde grid per series and
    report units.scale_deltap coordinates; inset points report <J^2/2> of the
    beta = 0 subspace (pseudoclassical) against the same abscissa.
    """
    if cfg.kind != "scaling":
        raise ValueError("config kind mismatch")
    model = cfg.models[0] if cfg.models else "pseudoclassical"
    points = []
    for s_idx, series in enumerate(cfg.sweep.get("series", [])):
        for x in cfg.sweep.get("nv_values", []):
            points.append(("main", s_idx, series, float(x)))
    for s_idx, series in enumerate(cfg.sweep.get("inset_series", [])):
        for x in cfg.sweep.get("inset_nv_values", []):
            points.append(("inset", s_idx, series, float(x)))

    def params_for(series, x):
        depth = series["potential_depth_h_mhz"] * 1e6 * PLANCK_H
        n = int(series["pulse_count"])
        base = replace(cfg.physical, potential_depth=depth, pulse_count=n)
        tp = pulse_duration_for_nv(x, n, depth, base)
        return base.with_pulse_duration(tp)

    def worker(i, point):
        curve, s_idx, series, x = point
        p = params_for(series, x)
        _check_validity_guard(p)
        d = derive_dimensionless(p)
        if curve == "main":
            vals = _dpmax_for_models(cfg, p, (model,), _point_seed(cfg.seed, i))
            dp = vals[model]
            _, y = scale_deltap(dp, p)
            return {"t_p_s": p.pulse_duration, "dp_max_recoil": dp, "scaled_ordinate": y,
                    "energy": float("nan"), "energy_over_nv": float("nan")}
        ens = uniform_theta_ensemble(
            cfg.fidelity.inset_trajectories, 0.0, d.epsilon, seed=_point_seed(cfg.seed, i)
        )
        _, trace = run_ensemble(ens, d, "pseudoclassical", p.pulse_count,
                                PendulumIntegratorConfig(cfg.fidelity.inset_substeps))
        e = float(trace[-1])
        return {"t_p_s": p.pulse_duration, "dp_max_recoil": float("nan"), "scaled_ordinate": float("nan"),
                "energy": e, "energy_over_nv": e / x}

    results = _run_points(points, worker, threads)
    columns = ["curve", "series", "pulse_count", "potential_depth_h_mhz", "t_p_s", "n_v_tilde",
               "dp_max_recoil", "scaled_ordinate", "energy", "energy_over_nv", "runtime_s", "status"]
    rows = []
    for point, res in zip(points, results):
        curve, s_idx, series, x = point
        row = {
            "curve": curve,
            "series": s_idx,
            "pulse_count": int(series["pulse_count"]),
            "potential_depth_h_mhz": float(series["potential_depth_h_mhz"]),
            "n_v_tilde": x,
            "runtime_s": res["runtime_s"],
            "status": res["status"],
        }
        payload = res["payload"] or {
            "t_p_s": float("nan"), "dp_max_recoil": float("nan"), "scaled_ordinate": float("nan"),
            "energy": float("nan"), "energy_over_nv": float("nan"),
        }
        row.update(payload)
        rows.append(row)
    return ScanResult("scaling", columns, rows, _provenance(cfg))


def _peak_summary(periods: np.ndarray, values: np.ndarray) -> dict:
    """Peak location (quadratic vertex refinement), value, and FWHM of a scan."""
    i = int(np.nanargmax(values))
    peak_t, peak_v = float(periods[i]), float(values[i])
    if 0 < i < periods.size - 1:
        y0, y1, y2 = values[i - 1 : i + 2]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            peak_t = float(periods[i] - 0.5 * (y2 - y0) / denom * (periods[1] - periods[0]))
    baseline = float(np.nanmin(values))
    half = baseline + 0.5 * (peak_v - baseline)
    above = np.nonzero(values >= half)[0]
    fwhm = float(periods[above[-1]] - periods[above[0]]) if above.size else float("nan")
    return {"peak_period_s": peak_t, "peak_dp_max_recoil": peak_v, "fwhm_s": fwhm,
            "baseline_dp_max_recoil": baseline}


def scan_period(cfg: ExperimentConfig, threads: int = 1) -> ScanResult:
    """dP_max as the pulse period is scanned across the Talbot time.

    Quantum model only: the pseudoclassical map is defined on resonance.
    """
    if cfg.kind != "scan-period":
        raise ValueError("config kind mismatch")
    t_t = talbot_time(cfg.physical)
    halfwin = float(cfg.sweep.get("period_halfwindow_s", 3e-6))
    step = float(cfg.sweep.get("period_step_s", 50e-9))
    n_side = int(round(halfwin / step))
    periods = t_t + step * np.arange(-n_side, n_side + 1)
    tps = [float(t) for t in cfg.sweep.get("pulse_durations_s", [cfg.physical.pulse_duration])]
    points = [(tp, float(T)) for tp in tps for T in periods]

    # periods share the pulse propagator per t_p, so group evaluation by t_p
    def worker(i, point):
        tp, T = point
        p = cfg.physical.with_pulse_duration(tp).with_period(T)
        _check_validity_guard(p)
        vals = _dpmax_for_models(cfg, p, ("full-quantum",), _point_seed(cfg.seed, i), period=T)
        return {"dp_max_recoil": vals["full-quantum"]}

    results = _run_points(points, worker, threads)
    columns = ["t_p_s", "period_s", "dp_max_recoil", "runtime_s", "status"]
    rows = []
    for (tp, T), res in zip(points, results):
        rows.append({
            "t_p_s": tp, "period_s": T,
            "dp_max_recoil": float(res["payload"]["dp_max_recoil"]) if res["payload"] else float("nan"),
            "runtime_s": res["runtime_s"], "status": res["status"],
        })
    result = ScanResult("scan-period", columns, rows, _provenance(cfg))
    peaks = {}
    for tp in tps:
        sel = [r for r in rows if r["t_p_s"] == tp and r["status"] == "ok"]
        if sel:
            ts = np.array([r["period_s"] for r in sel])
            vs = np.array([r["dp_max_recoil"] for r in sel])
            peaks[f"tp_{tp:.3e}"] = _peak_summary(ts, vs)
    result.provenance["talbot_time_s"] = t_t
    result.provenance["peaks"] = peaks
    return result


def distribution(cfg: ExperimentConfig, threads: int = 1, dump_ensemble: bool = False) -> ScanResult:
    """Momentum distributions with and without the pulse train, plus analysis.

    Produces the distribution table for every selected model alongside the
    no-pulse reference; the extras hold each pipeline stage (profiles,
    smoothed difference, crossings) for plot reproduction. dump_ensemble adds
    the final (theta, J) trajectory snapshot of the Monte-Carlo model.
    """
    if cfg.kind != "distribution":
        raise ValueError("config kind mismatch")
    p = cfg.physical
    _check_validity_guard(p)
    init = cfg.thermal
    models = cfg.models
    binning = binning_for(p, [QUANTUM_MODELS.get(m, m) for m in models], init)
    collect: dict = {}
    _dpmax_for_models(cfg, p, models, cfg.seed, collect=collect, capture_ensembles=dump_ensemble)
    ref_dist = maxwell_boltzmann_distribution(init, p, binning)

    columns = ["p_recoil", "density_no_sw"] + [f"density_{m.replace('-', '_')}" for m in models]
    rows = []
    centers = binning.centers()
    for k in range(centers.size):
        row = {"p_recoil": float(centers[k]), "density_no_sw": float(ref_dist.densities[k])}
        for m in models:
            row[f"density_{m.replace('-', '_')}"] = float(collect[m]["distribution"].densities[k])
        rows.append(row)
    result = ScanResult("distribution", columns, rows, _provenance(cfg), extras=collect)
    result.provenance["dp_max_recoil"] = {
        m: collect[m]["detail"]["delta_p_max"] for m in models
    }
    result.provenance["analysis"] = {
        m: {
            "threshold_per_recoil": cfg.analysis.threshold,
            "smoothing_span_recoil": cfg.analysis.smoothing_span,
            "smoothing_passes": cfg.analysis.smoothing_passes,
            "crossings_recoil": collect[m]["detail"]["crossings_recoil"],
            "found": collect[m]["detail"]["found"],
        }
        for m in models
    }
    return result


RUNNERS = {
    "compare-models": compare_models,
    "sweep-tp": sweep_tp,
    "scaling": scaling_curve,
    "scan-period": scan_period,
    "distribution": distribution,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1, **kwargs) -> ScanResult:
    return RUNNERS[cfg.kind](cfg, threads=threads, **kwargs)
