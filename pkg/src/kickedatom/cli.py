"""Command-line driver.

Subcommands mirror the experiment kinds plus a `params` inspector. Every run
writes result.csv and result.json into --out; the exit code is nonzero when
any sweep point failed, unless --allow-partial is given.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .constants import PLANCK_H, default_atom_data_path
from .experiments import config_from_dict, config_hash, default_config, run_experiment
from .results import append_progress, write_scan_result
from .units import (
    atom_line_from_file,
    derive_dimensionless,
    dipole_depth,
    dipole_depth_detail,
    rb85_params,
    scale_deltap,
    talbot_time,
)

EXPERIMENT_KINDS = ("compare-models", "sweep-tp", "scaling", "scan-period", "distribution")


def _add_common(sub):
    sub.add_argument("--config", type=Path, help="JSON experiment config; defaults are paper parameters")
    sub.add_argument("--seed", type=int, help="override the config seed")
    sub.add_argument("--threads", type=int, default=1, help="worker threads across sweep points")
    sub.add_argument("--out", type=Path, default=None, help="output directory (default runs/<kind>)")
    sub.add_argument("--emit-intermediates", action="store_true",
                     help="dump every imaging pipeline stage for plot reproduction")
    sub.add_argument("--allow-partial", action="store_true",
                     help="exit 0 even when some sweep points failed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kickedatom", description=__doc__)
    parser.add_argument("--version", action="version", version=f"kickedatom {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_params = subs.add_parser("params", help="inspect derived parameters as JSON")
    p_params.add_argument("--pulse-duration-ns", type=float, default=250.0)
    p_params.add_argument("--depth-mhz", type=float, default=7.24, help="V_d/h in MHz")
    p_params.add_argument("--pulse-count", type=int, default=6)
    p_params.add_argument("--resonance-order", type=int, default=1)
    p_params.add_argument("--atom-file", type=Path, default=None,
                          help="atom/laser JSON data file (default: shipped Rb85 D2 set)")
    p_params.add_argument("--dp-max", type=float, default=None,
                          help="also report scale_deltap coordinates for this width (recoils)")
    p_params.add_argument("--debug-mf", action="store_true", help="include per-m_F dipole depths")

    for kind in EXPERIMENT_KINDS:
        sub = subs.add_parser(kind, help=f"run the {kind} experiment")
        _add_common(sub)
        if kind == "distribution":
            sub.add_argument("--dump-ensemble", action="store_true",
                             help="also export the final Monte-Carlo (theta, J) snapshot")
    return parser


def cmd_params(args) -> int:
    p = rb85_params(
        pulse_duration=args.pulse_duration_ns * 1e-9,
        depth_over_h_mhz=args.depth_mhz,
        pulse_count=args.pulse_count,
        resonance_order=args.resonance_order,
    )
    d = derive_dimensionless(p)
    line = atom_line_from_file(args.atom_file)
    v_d_file = dipole_depth(line)
    out = {
        "physical": {
            "atomic_mass_kg": p.atomic_mass,
            "laser_wavenumber_rad_m": p.laser_wavenumber,
            "standing_wave_wavenumber_rad_m": p.K,
            "pulse_duration_s": p.pulse_duration,
            "potential_depth_j": p.potential_depth,
            "potential_depth_h_mhz": p.depth_over_h / 1e6,
            "pulse_count": p.pulse_count,
            "pulse_period_s": p.pulse_period,
            "resonance_order": p.resonance_order,
        },
        "dimensionless": {
            "epsilon": d.epsilon,
            "v_tilde": d.v_tilde,
            "phi_d": d.phi_d,
            "beta": d.beta,
        },
        "talbot_time_s": talbot_time(p),
        "dipole_depth_from_atom_file": {
            "atom_file": str(args.atom_file) if args.atom_file else default_atom_data_path(),
            "v_d_j": v_d_file,
            "v_d_h_mhz": v_d_file / PLANCK_H / 1e6,
            "light_intensity_w_m2": line.light_intensity,
            "retro_power_ratio": line.retro_power_ratio,
        },
    }
    if args.debug_mf:
        detail = dipole_depth_detail(line)
        out["dipole_depth_from_atom_file"]["per_m_f_h_mhz"] = {
            str(m): v / PLANCK_H / 1e6 for m, v in detail["per_m_f"].items()
        }
    if args.dp_max is not None:
        x, y = scale_deltap(args.dp_max, p)
        out["scaling"] = {"n_v_tilde": x, "scaled_ordinate_sqrt_s": y}
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def cmd_experiment(kind: str, args) -> int:
    if args.config is not None:
        with open(args.config) as fh:
            raw = json.load(fh)
        if raw.get("kind", kind) != kind:
            print(f"error: config kind {raw.get('kind')!r} does not match subcommand {kind!r}", file=sys.stderr)
            return 2
        raw["kind"] = kind
        cfg = config_from_dict(raw)
    else:
        cfg = default_config(kind)
    if args.seed is not None:
        cfg.seed = args.seed
    outdir = args.out or Path("runs") / kind.replace("-", "_")

    t0 = time.perf_counter()
    append_progress(outdir, f"start kind={kind} hash={config_hash(cfg)} seed={cfg.seed}")
    kwargs = {}
    if kind == "sweep-tp":
        kwargs["emit_intermediates"] = args.emit_intermediates
    if kind == "distribution" and getattr(args, "dump_ensemble", False):
        kwargs["dump_ensemble"] = True
    result = run_experiment(cfg, threads=args.threads, **kwargs)
    emit = kind == "distribution" and (args.emit_intermediates or getattr(args, "dump_ensemble", False))
    emit = emit or (args.emit_intermediates and kind == "sweep-tp")
    csv_path = write_scan_result(result, outdir, emit_intermediates=emit)
    elapsed = time.perf_counter() - t0
    failed = len(result.failed_rows)
    append_progress(outdir, f"done kind={kind} rows={len(result.rows)} failed={failed} elapsed={elapsed:.1f}s")
    print(f"{kind}: {len(result.rows)} rows -> {csv_path} ({elapsed:.1f} s, {failed} failed points)")
    if failed and not args.allow_partial:
        for row in result.failed_rows[:5]:
            print(f"  failed: {row['status']}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "params":
        return cmd_params(args)
    return cmd_experiment(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
