import json
import warnings

import numpy as np
import pytest

from kickedatom.experiments import (
    FidelityConfig,
    ModelValidityWarning,
    config_from_dict,
    config_hash,
    default_config,
    run_experiment,
)
from kickedatom.results import write_scan_result
from kickedatom.units import rb85_params


def small_fidelity(**kw):
    base = dict(trajectories=15_000, substeps=16, compare_trajectories=3_000,
                compare_beta_points=8, inset_trajectories=3_000, inset_substeps=8)
    base.update(kw)
    return FidelityConfig(**base)


class TestConfig:
    def test_defaults_round_trip_through_json(self):
        for kind in ("compare-models", "sweep-tp", "scaling", "scan-period", "distribution"):
            cfg = default_config(kind)
            raw = json.loads(json.dumps(cfg.to_dict()))
            cfg2 = config_from_dict(raw)
            assert config_hash(cfg2) == config_hash(cfg)

    def test_rb85_shorthand(self):
        cfg = config_from_dict({
            "kind": "sweep-tp",
            "physical": {"pulse_duration_s": 2.5e-7, "potential_depth_h_mhz": 7.24, "pulse_count": 6},
            "sweep": {"pulse_durations_s": [1e-7]},
        })
        assert cfg.physical.depth_over_h == pytest.approx(7.24e6)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            config_from_dict({"kind": "nope", "physical": {
                "pulse_duration_s": 1e-7, "potential_depth_h_mhz": 1.0, "pulse_count": 1}})

    def test_validity_guard_warns(self):
        cfg = default_config("sweep-tp")
        cfg.physical = rb85_params(2.5e-6, 7.5, 13)
        cfg.sweep["pulse_durations_s"] = [2.5e-6]
        cfg.models = ("pseudoclassical",)
        cfg.fidelity = small_fidelity(trajectories=2000)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            run_experiment(cfg, threads=1)
        assert any(issubclass(w.category, ModelValidityWarning) for w in caught)


class TestSweepTp:
    def test_rows_in_config_order_with_fit(self):
        cfg = default_config("sweep-tp")
        cfg.sweep["pulse_durations_s"] = [1e-7, 2.5e-7, 4e-7]
        cfg.models = ("delta-kick", "pseudoclassical")
        cfg.fidelity = small_fidelity()
        res = run_experiment(cfg, threads=2)
        assert [r["t_p_s"] for r in res.rows] == [1e-7, 2.5e-7, 4e-7]
        assert all(r["status"] == "ok" for r in res.rows)
        fit = res.provenance["delta_kick_linear_fit"]
        assert fit["slope_recoil_per_s"] > 0.0
        # delta-kick width grows with t_p
        dps = [r["dp_max_delta_kick"] for r in res.rows]
        assert dps[0] < dps[1] < dps[2]

    def test_failed_point_recorded_not_raised(self):
        cfg = default_config("sweep-tp")
        # second point exceeds the pulse period: invalid parameters
        cfg.sweep["pulse_durations_s"] = [1e-7, 1.0]
        cfg.models = ("pseudoclassical",)
        cfg.fidelity = small_fidelity()
        res = run_experiment(cfg, threads=1)
        assert res.rows[0]["status"] == "ok"
        assert res.rows[1]["status"].startswith("error:")
        assert np.isnan(res.rows[1]["dp_max_pseudoclassical"])
        assert len(res.failed_rows) == 1


class TestScanPeriod:
    def test_peak_summary(self):
        cfg = default_config("scan-period")
        cfg.sweep["pulse_durations_s"] = [430e-9]
        cfg.sweep["period_halfwindow_s"] = 0.4e-6
        cfg.sweep["period_step_s"] = 0.2e-6
        cfg.fidelity = small_fidelity()
        res = run_experiment(cfg, threads=2)
        assert len(res.rows) == 5
        peaks = res.provenance["peaks"]
        (summary,) = peaks.values()
        t_t = res.provenance["talbot_time_s"]
        assert abs(summary["peak_period_s"] - t_t) < 0.3e-6
        center = [r for r in res.rows if abs(r["period_s"] - t_t) < 1e-9][0]
        edge = res.rows[0]
        assert center["dp_max_recoil"] > edge["dp_max_recoil"]


class TestScaling:
    def test_main_and_inset_rows(self):
        cfg = default_config("scaling")
        cfg.sweep["series"] = [{"pulse_count": 6, "potential_depth_h_mhz": 7.24}]
        cfg.sweep["nv_values"] = [2.0, 6.0]
        cfg.sweep["inset_series"] = [{"pulse_count": 10, "potential_depth_h_mhz": 18.5}]
        cfg.sweep["inset_nv_values"] = [2.0, 6.0]
        cfg.fidelity = small_fidelity()
        res = run_experiment(cfg, threads=2)
        main = [r for r in res.rows if r["curve"] == "main"]
        inset = [r for r in res.rows if r["curve"] == "inset"]
        assert len(main) == 2 and len(inset) == 2
        assert all(np.isfinite(r["scaled_ordinate"]) for r in main)
        assert all(np.isfinite(r["energy"]) for r in inset)
        assert inset[0]["energy_over_nv"] == pytest.approx(inset[0]["energy"] / 2.0)


class TestDeterminism:
    def test_csv_bit_identical_across_thread_counts(self, tmp_path):
        cfg = default_config("sweep-tp")
        cfg.sweep["pulse_durations_s"] = [1.5e-7, 3e-7]
        cfg.models = ("pseudoclassical", "full-quantum")
        cfg.fidelity = small_fidelity()
        blobs = []
        for threads in (1, 3):
            out = tmp_path / f"t{threads}"
            write_scan_result(run_experiment(cfg, threads=threads), out)
            blobs.append((out / "result.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_seed_changes_results(self):
        cfg = default_config("sweep-tp")
        cfg.sweep["pulse_durations_s"] = [2.5e-7]
        cfg.models = ("pseudoclassical",)
        cfg.fidelity = small_fidelity(trajectories=4000)
        a = run_experiment(cfg, threads=1).rows[0]["dp_max_pseudoclassical"]
        cfg.seed = cfg.seed + 1
        b = run_experiment(cfg, threads=1).rows[0]["dp_max_pseudoclassical"]
        assert a != b  # Monte-Carlo noise must respond to the seed


class TestCompareModels:
    def test_grid_shape_and_resonance(self):
        cfg = default_config("compare-models")
        cfg.sweep["max_pulses"] = 5
        cfg.sweep["beta_points"] = 4
        cfg.fidelity = small_fidelity()
        res = run_experiment(cfg, threads=2)
        assert len(res.rows) == 4 * 6
        betas = sorted({r["beta"] for r in res.rows})
        assert betas == [0.0, 0.25, 0.5, 0.75]
        e_q = {r["beta"]: r["energy_full_quantum"] for r in res.rows if r["n_pulses"] == 5}
        assert e_q[0.0] > 3 * e_q[0.25]
        assert e_q[0.5] > 3 * e_q[0.25]
