"""Result-directory loading and schema validation.

A result directory holds result.csv plus a result.json sidecar with the
experiment kind, column list, and config hash. Figures never recompute
physics from these files; they only check shape and plot.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input files do not match the expected result schema."""


EXPECTED_KIND = {
    "fig2": "compare-models",
    "fig3": "distribution",
    "fig4": "sweep-tp",
    "fig5": "scaling",
    "fig6": "scan-period",
}

REQUIRED_COLUMNS = {
    "fig2": ["n_pulses", "beta", "energy_full_quantum", "energy_delta_kick",
             "energy_pseudoclassical", "energy_classical"],
    "fig3": ["p_recoil", "density_no_sw"],
    "fig4": ["t_p_s", "epsilon"],
    "fig5": ["curve", "series", "pulse_count", "potential_depth_h_mhz",
             "t_p_s", "n_v_tilde", "scaled_ordinate", "energy"],
    "fig6": ["t_p_s", "period_s", "dp_max_recoil"],
}


class ResultDir:
    """One experiment output directory: sidecar metadata plus the CSV table."""

    def __init__(self, path):
        self.path = Path(path)
        csv_path = self.path / "result.csv"
        json_path = self.path / "result.json"
        if not csv_path.exists() or not json_path.exists():
            raise SchemaError(f"{self.path}: result.csv / result.json not found")
        with open(json_path) as fh:
            self.sidecar = json.load(fh)
        for key in ("kind", "columns", "config_hash"):
            if key not in self.sidecar:
                raise SchemaError(f"{json_path}: sidecar missing {key!r}")
        with open(csv_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
        if header != self.sidecar["columns"]:
            raise SchemaError(
                f"{csv_path}: header {header} does not match sidecar columns "
                f"{self.sidecar['columns']} (config hash {self.sidecar['config_hash']})"
            )
        self.columns = header
        self._rows = rows

    @property
    def kind(self) -> str:
        return self.sidecar["kind"]

    def require(self, figure_id: str):
        if self.kind != EXPECTED_KIND[figure_id]:
            raise SchemaError(
                f"{self.path}: {figure_id} needs a {EXPECTED_KIND[figure_id]!r} result, got {self.kind!r}"
            )
        missing = [c for c in REQUIRED_COLUMNS[figure_id] if c not in self.columns]
        if missing:
            raise SchemaError(f"{self.path}: missing columns for {figure_id}: {missing}")

    def column(self, name, dtype=float) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"{self.path}: missing column {name!r}")
        i = self.columns.index(name)
        if dtype is str:
            return np.array([r[i] for r in self._rows])
        return np.array([float(r[i]) for r in self._rows])

    def ok_mask(self) -> np.ndarray:
        if "status" not in self.columns:
            return np.ones(len(self._rows), dtype=bool)
        return self.column("status", dtype=str) == "ok"

    def intermediates_table(self, name: str) -> dict:
        """Load intermediates/<name>.csv as {column: array}."""
        path = self.path / "intermediates" / f"{name}.csv"
        if not path.exists():
            raise SchemaError(f"{path}: intermediate file not found")
        data = np.genfromtxt(path, delimiter=",", names=True)
        return {n: np.atleast_1d(data[n]) for n in data.dtype.names}

    def intermediates_json(self, name: str) -> dict:
        path = self.path / "intermediates" / f"{name}.json"
        if not path.exists():
            raise SchemaError(f"{path}: intermediate file not found")
        with open(path) as fh:
            return json.load(fh)
