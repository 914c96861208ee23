import json
import subprocess
import sys

import pytest

PRIMARY_CLI = [sys.executable, "-m", "kickedatom.cli"]


def run_primary(args):
    proc = subprocess.run(PRIMARY_CLI + list(args), capture_output=True, text=True)
    assert proc.returncode == 0, f"primary CLI failed: {proc.stderr}\n{proc.stdout}"
    return proc


SMALL_FIDELITY = {"trajectories": 4000, "substeps": 12, "compare_trajectories": 1500,
                  "compare_beta_points": 6, "inset_trajectories": 1500, "inset_substeps": 8}


def small_config(kind: str) -> dict:
    base = {
        "kind": kind,
        "seed": 11,
        "physical": {"pulse_duration_s": 2.5e-7, "potential_depth_h_mhz": 7.24, "pulse_count": 6},
        "fidelity": dict(SMALL_FIDELITY),
    }
    if kind == "compare-models":
        base["models"] = ["full-quantum", "delta-kick", "pseudoclassical", "classical"]
        base["physical"] = {"pulse_duration_s": 5.154e-7, "potential_depth_h_mhz": 6.176, "pulse_count": 6}
        base["sweep"] = {"max_pulses": 6, "beta_points": 6}
    elif kind == "sweep-tp":
        base["models"] = ["delta-kick", "pseudoclassical"]
        base["sweep"] = {"pulse_durations_s": [1e-7, 2e-7, 3e-7]}
    elif kind == "scaling":
        base["models"] = ["pseudoclassical"]
        base["sweep"] = {
            "series": [{"pulse_count": 6, "potential_depth_h_mhz": 7.24},
                       {"pulse_count": 10, "potential_depth_h_mhz": 3.47}],
            "nv_values": [2.0, 5.0, 8.0],
            "inset_series": [{"pulse_count": 10, "potential_depth_h_mhz": 18.5}],
            "inset_nv_values": [2.0, 5.0, 8.0],
        }
    elif kind == "scan-period":
        base["models"] = ["full-quantum"]
        base["physical"] = {"pulse_duration_s": 4.3e-7, "potential_depth_h_mhz": 5.89, "pulse_count": 10}
        base["sweep"] = {"pulse_durations_s": [4.3e-7], "period_halfwindow_s": 4e-7, "period_step_s": 2e-7}
    elif kind == "distribution":
        base["models"] = ["pseudoclassical"]
        base["sweep"] = {}
    return base


@pytest.fixture(scope="session")
def fresh_run_dirs(tmp_path_factory):
    """A fresh full run of the primary CLI at reduced fidelity, all five kinds."""
    root = tmp_path_factory.mktemp("primary_runs")
    dirs = {}
    for kind in ("compare-models", "sweep-tp", "scaling", "scan-period", "distribution"):
        cfg = small_config(kind)
        cfg_path = root / f"{kind}.json"
        cfg_path.write_text(json.dumps(cfg))
        out = root / kind.replace("-", "_")
        args = [kind, "--config", str(cfg_path), "--out", str(out), "--threads", "2"]
        if kind == "distribution":
            args.append("--emit-intermediates")
        run_primary(args)
        dirs[kind] = out
    return dirs
