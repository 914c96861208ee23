"""Secondary acceptance: all five figure analogues from a fresh primary run."""

from figs.render import build_fig3, render
from figs.schema import ResultDir

FIGURE_INPUT = {
    "fig2": "compare-models",
    "fig3": "distribution",
    "fig4": "sweep-tp",
    "fig5": "scaling",
    "fig6": "scan-period",
}


def test_criterion_11_all_figures_from_fresh_run(fresh_run_dirs, tmp_path):
    rendered = {}
    for figure_id, kind in FIGURE_INPUT.items():
        out = render(figure_id, fresh_run_dirs[kind], tmp_path / f"{figure_id}.png")
        assert out.exists() and out.stat().st_size > 10_000, f"{figure_id} image missing or empty"
        rendered[figure_id] = out

    # fig3 difference panel: log scale with the threshold line visible
    fig = build_fig3(ResultDir(fresh_run_dirs["distribution"]))
    ax = fig.axes[1]
    assert ax.get_yscale() == "log"
    thr_lines = [ln for ln in ax.get_lines() if ln.get_label() == "threshold"]
    assert thr_lines, "threshold line missing from the fig3 difference panel"
    y_thr = thr_lines[0].get_ydata()[0]
    lo, hi = ax.get_ylim()
    assert lo < y_thr < hi, "threshold line outside the visible range"
    print(
        "\n[ACCEPTANCE 11] PASS: five figure analogues rendered from a fresh primary run "
        f"({', '.join(sorted(rendered))}); fig3 difference panel is log-scale with visible threshold"
    )
