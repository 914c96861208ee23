"""Result serialization: CSV tables with JSON sidecars.

Floats are written with repr (shortest round-trip form), so a rerun with the
same config and seed produces byte-identical files regardless of thread count.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

import numpy as np

from .experiments import ScanResult


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def write_table(path: Path, columns, rows):
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


VOLATILE_COLUMNS = ("runtime_s",)  # wall-clock values go to the sidecar, not the CSV


def write_scan_result(result: ScanResult, outdir, emit_intermediates: bool = False) -> Path:
    """Write result.csv and result.json (plus optional intermediates) to outdir.

    The CSV body is a pure function of (config, seed); per-point runtimes are
    recorded in the JSON sidecar so reruns stay byte-identical.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_columns = [c for c in result.columns if c not in VOLATILE_COLUMNS]
    write_table(outdir / "result.csv", csv_columns, result.rows)
    sidecar = dict(result.provenance)
    sidecar["kind"] = result.kind
    sidecar["columns"] = csv_columns
    sidecar["failed_points"] = len(result.failed_rows)
    if "runtime_s" in result.columns:
        sidecar["runtimes_s"] = [row["runtime_s"] for row in result.rows]
    with open(outdir / "result.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    if emit_intermediates and result.extras:
        _write_intermediates(result, outdir / "intermediates")
    return outdir / "result.csv"


def _write_intermediates(result: ScanResult, outdir: Path):
    """Dump every pipeline stage kept in the extras (distributions, profiles, curves)."""
    outdir.mkdir(parents=True, exist_ok=True)
    for key, stage in result.extras.items():
        if isinstance(stage, dict) and "distribution" in stage:
            _write_pipeline_stage(outdir, key, stage)
        elif isinstance(stage, dict):
            for model, inner in stage.items():
                if isinstance(inner, dict) and "distribution" in inner:
                    _write_pipeline_stage(outdir, f"{key}_{model}", inner)


def _write_pipeline_stage(outdir: Path, label: str, stage: dict):
    label = label.replace("-", "_")
    dist = stage["distribution"]
    write_table(
        outdir / f"{label}_distribution.csv",
        ["p_recoil", "density"],
        [{"p_recoil": c, "density": d} for c, d in zip(dist.centers, dist.densities)],
    )
    prof = stage["profile"]
    ref = stage["reference_profile"]
    write_table(
        outdir / f"{label}_profile.csv",
        ["x_m", "p_recoil", "density_per_m", "reference_density_per_m"],
        [
            {"x_m": x, "p_recoil": pr, "density_per_m": d, "reference_density_per_m": rd}
            for x, pr, d, rd in zip(prof.positions, prof.momentum_axis(), prof.densities, ref.densities)
        ],
    )
    detail = stage["detail"]
    diff = detail["difference"]
    write_table(
        outdir / f"{label}_difference.csv",
        ["x_m", "p_recoil", "difference_per_m"],
        [
            {"x_m": x, "p_recoil": pr, "difference_per_m": d}
            for x, pr, d in zip(prof.positions, prof.momentum_axis(), diff)
        ],
    )
    if "ensemble" in stage:
        ens = stage["ensemble"]
        write_table(
            outdir / f"{label}_ensemble.csv",
            ["theta", "j"],
            [{"theta": t, "j": j} for t, j in zip(ens["thetas"], ens["js"])],
        )
    meta = {k: v for k, v in detail.items() if k != "difference"}
    meta["x_per_recoil_m"] = prof.x_per_recoil
    with open(outdir / f"{label}_analysis.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def append_progress(outdir, message: str):
    """Append-only progress log; ordering may vary under threads."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "progress.log", "a") as fh:
        fh.write(message.rstrip() + os.linesep)
