"""Independent standing-wave depth evaluation from an atom/laser data file.

This is a deliberate re-implementation of the sum-over-transitions light
shift (no shared code with the simulation package) used to cross-check the
depth value reported by the primary CLI.
"""

from __future__ import annotations

import json
import math

HBAR = 1.054571817e-34
EPS0 = 8.8541878128e-12
C_LIGHT = 299792458.0
E_CHARGE = 1.602176634e-19
BOHR_RADIUS = 5.29177210903e-11


def depth_from_file(path) -> float:
    """Potential depth V_d [J]: m_F averaged antinode-node light shift difference."""
    with open(path) as fh:
        data = json.load(fh)
    per_mf: dict = {}
    for t in data["transitions"]:
        mu = t["mu_e_a0"] * E_CHARGE * BOHR_RADIUS
        delta = 2.0 * math.pi * t["delta_hz"]
        per_mf.setdefault(t.get("m_F"), 0.0)
        per_mf[t.get("m_F")] += mu * mu / delta
    shift_per_intensity = sum(per_mf.values()) / (len(per_mf) * 2.0 * EPS0 * C_LIGHT * HBAR)
    r = data["retro_power_ratio"]
    i0 = data["light_intensity_w_m2"]
    contrast = i0 * ((1.0 + math.sqrt(r)) ** 2 - (1.0 - math.sqrt(r)) ** 2)
    return -shift_per_intensity * contrast


def check_against(path, reported_depth_j: float, rel_tol: float = 1e-10) -> float:
    """Return the relative deviation; raise if it exceeds rel_tol."""
    own = depth_from_file(path)
    rel = abs(own - reported_depth_j) / abs(reported_depth_j)
    if rel > rel_tol:
        raise ValueError(
            f"dipole depth mismatch: file gives {own!r} J, reported {reported_depth_j!r} J "
            f"(relative {rel:.3e} > {rel_tol:g})"
        )
    return rel
