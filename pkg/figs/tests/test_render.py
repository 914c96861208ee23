import json
import subprocess
import sys

import pytest

from figs.depthcheck import check_against, depth_from_file
from figs.render import build_fig3, render
from figs.schema import ResultDir, SchemaError


class TestRender:
    def test_unknown_figure_id(self, tmp_path):
        with pytest.raises(SchemaError, match="unknown figure id"):
            render("fig9", tmp_path, tmp_path / "x.png")

    def test_wrong_kind_reports_schema_error(self, fresh_run_dirs, tmp_path):
        with pytest.raises(SchemaError, match="needs a 'compare-models' result"):
            render("fig2", fresh_run_dirs["sweep-tp"], tmp_path / "x.png")

    def test_rendering_is_idempotent(self, fresh_run_dirs, tmp_path):
        a = render("fig4", fresh_run_dirs["sweep-tp"], tmp_path / "a.png")
        b = render("fig4", fresh_run_dirs["sweep-tp"], tmp_path / "b.png")
        assert a.read_bytes() == b.read_bytes()

    def test_rendering_does_not_mutate_inputs(self, fresh_run_dirs, tmp_path):
        src = fresh_run_dirs["scan-period"] / "result.csv"
        before = src.read_bytes()
        render("fig6", fresh_run_dirs["scan-period"], tmp_path / "f6.png")
        assert src.read_bytes() == before

    def test_fig3_log_panel_and_threshold(self, fresh_run_dirs):
        res = ResultDir(fresh_run_dirs["distribution"])
        fig = build_fig3(res)
        ax_bot = fig.axes[1]
        assert ax_bot.get_yscale() == "log"
        labels = [line.get_label() for line in ax_bot.get_lines()]
        assert "threshold" in labels
        fig.clf()


def params_output():
    proc = subprocess.run(
        [sys.executable, "-m", "kickedatom.cli", "params"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    return json.loads(proc.stdout)


class TestDepthCheck:
    def test_independent_depth_matches_primary(self):
        # primary CLI reports the depth and the data file it used; the
        # independent sum-over-transitions evaluation must agree to 1e-10
        info = params_output()["dipole_depth_from_atom_file"]
        rel = check_against(info["atom_file"], info["v_d_j"], rel_tol=1e-10)
        assert rel <= 1e-10

    def test_depth_positive_for_red_detuning(self):
        info = params_output()["dipole_depth_from_atom_file"]
        assert depth_from_file(info["atom_file"]) > 0.0
