"""Figure builders: result tables in, publication-style figure analogues out.

Each build_* function returns a matplotlib Figure assembled purely from the
result files; render() saves it with fixed metadata so identical inputs give
identical image bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import ResultDir, SchemaError

MODEL_LABELS = {
    "full_quantum": "full quantum",
    "delta_kick": "delta-kicked particle",
    "pseudoclassical": "pseudoclassical",
    "classical": "classical",
}
MODEL_ORDER = ["full_quantum", "delta_kick", "pseudoclassical", "classical"]


def build_fig2(res: ResultDir):
    """2x2 grid of <J^2/2> heatmaps over (pulse count, quasimomentum)."""
    res.require("fig2")
    betas = np.unique(res.column("beta"))
    pulses = np.unique(res.column("n_pulses").astype(int))
    fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True, sharey=True)
    b = res.column("beta")
    n = res.column("n_pulses").astype(int)
    for ax, model in zip(axes.ravel(), MODEL_ORDER):
        grid = np.full((betas.size, pulses.size), np.nan)
        e = res.column(f"energy_{model}")
        bi = np.searchsorted(betas, b)
        ni = np.searchsorted(pulses, n)
        grid[bi, ni] = e
        im = ax.imshow(
            grid,
            origin="lower",
            aspect="auto",
            extent=(pulses.min() - 0.5, pulses.max() + 0.5, betas.min(), betas.max() + (betas[1] - betas[0] if betas.size > 1 else 1.0)),
            cmap="viridis",
        )
        ax.set_title(MODEL_LABELS[model])
        fig.colorbar(im, ax=ax, label=r"$\langle \mathcal{J}^2/2 \rangle$")
    for ax in axes[1]:
        ax.set_xlabel("pulse number N")
    for ax in axes[:, 0]:
        ax.set_ylabel(r"quasimomentum $\beta$")
    fig.suptitle("Mean scaled kinetic energy by model")
    fig.tight_layout()
    return fig


def _fig3_model(res: ResultDir) -> str:
    models = [c[len("density_"):] for c in res.columns if c.startswith("density_") and c != "density_no_sw"]
    if not models:
        raise SchemaError(f"{res.path}: no model density columns found")
    for preferred in ("pseudoclassical", "full_quantum"):
        if preferred in models:
            return preferred
    return models[0]


def build_fig3(res: ResultDir):
    """Distribution panel plus log-scale difference panel with threshold line."""
    res.require("fig3")
    model = _fig3_model(res)
    p = res.column("p_recoil")
    fig, (ax_top, ax_bot) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
    ax_top.plot(p, res.column("density_no_sw"), "-.", label="no SW", color="tab:gray")
    for col in res.columns:
        if col.startswith("density_") and col != "density_no_sw":
            m = col[len("density_"):]
            ax_top.plot(p, res.column(col), label=f"{MODEL_LABELS.get(m, m)} (SW)")
    ax_top.set_ylabel("probability per bin")
    ax_top.legend()
    ax_top.set_title("Momentum distributions")

    diff = res.intermediates_table(f"{model}_difference")
    meta = res.intermediates_json(f"{model}_analysis")
    x_per_recoil = meta["x_per_recoil_m"]
    diff_per_recoil = diff["difference_per_m"] * x_per_recoil
    threshold = meta["threshold_per_recoil"]
    ax_bot.plot(diff["p_recoil"], np.clip(diff_per_recoil, 0.0, None), label=f"SW $-$ no SW ({MODEL_LABELS.get(model, model)})")
    ax_bot.axhline(threshold, linestyle="--", color="k", label="threshold")
    ax_bot.set_yscale("log")
    ax_bot.set_ylim(threshold / 30.0, None)
    crossings = meta.get("crossings_recoil")
    if crossings:
        for xc in crossings:
            ax_bot.axvline(xc, linestyle=":", color="tab:red", alpha=0.7)
        ax_bot.set_title(f"Difference curve, dP_max = {meta['delta_p_max']:.1f} recoils")
    ax_bot.set_xlabel(r"momentum [$\hbar k_L$]")
    ax_bot.set_ylabel(r"difference per $\hbar k_L$")
    ax_bot.legend()
    fig.tight_layout()
    return fig


def build_fig4(res: ResultDir):
    """dP_max against pulse duration for every model column present."""
    res.require("fig4")
    ok = res.ok_mask()
    tp = res.column("t_p_s")[ok] * 1e9
    fig, ax = plt.subplots(figsize=(7, 5))
    markers = {"dp_max_delta_kick": "s", "dp_max_full_quantum": "^", "dp_max_pseudoclassical": None}
    for col in res.columns:
        if not col.startswith("dp_max_"):
            continue
        m = col[len("dp_max_"):]
        vals = res.column(col)[ok]
        style = markers.get(col, "o")
        if style is None:
            ax.plot(tp, vals, "-", lw=2.2, label=MODEL_LABELS.get(m, m))
        else:
            ax.plot(tp, vals, style, ls="none", ms=6, label=MODEL_LABELS.get(m, m))
    fit = res.sidecar.get("delta_kick_linear_fit")
    if fit:
        xs = np.linspace(tp.min(), tp.max(), 50)
        ax.plot(xs, fit["slope_recoil_per_s"] * xs * 1e-9 + fit["intercept_recoil"],
                ":", color="gray", label="linear fit (delta kick)")
    ax.set_xlabel(r"pulse duration $t_p$ [ns]")
    ax.set_ylabel(r"$\Delta P_{max}$ [$\hbar k_L$]")
    ax.legend()
    fig.tight_layout()
    return fig


def build_fig5(res: ResultDir):
    """Scaling-law collapse curves with the beta = 0 inset."""
    res.require("fig5")
    ok = res.ok_mask()
    curve = res.column("curve", dtype=str)
    series = res.column("series").astype(int)
    x = res.column("n_v_tilde")
    fig, ax = plt.subplots(figsize=(7.5, 5.5))
    styles = ["-", "--", ":", "-."]
    for s in np.unique(series[(curve == "main") & ok]):
        sel = (curve == "main") & ok & (series == s)
        n = int(res.column("pulse_count")[sel][0])
        v = res.column("potential_depth_h_mhz")[sel][0]
        order = np.argsort(x[sel])
        ax.plot(x[sel][order], res.column("scaled_ordinate")[sel][order],
                styles[int(s) % len(styles)], label=f"N={n}, $V_d/h$={v:g} MHz")
    ax.set_xlabel(r"$N\tilde{V}$")
    ax.set_ylabel(r"$\Delta P_{max} / \sqrt{N V_d/h}$  [$\sqrt{s}$]")
    ax.legend(loc="lower right")

    inset_sel = (curve == "inset") & ok
    if np.any(inset_sel):
        ax_in = ax.inset_axes([0.12, 0.55, 0.38, 0.4])
        for s in np.unique(series[inset_sel]):
            sel = inset_sel & (series == s)
            n = int(res.column("pulse_count")[sel][0])
            order = np.argsort(x[sel])
            ax_in.plot(x[sel][order], res.column("energy")[sel][order],
                       styles[int(s) % len(styles)], label=f"N={n}")
        ax_in.set_xlabel(r"$N\tilde{V}$", fontsize=8)
        ax_in.set_ylabel(r"$\langle \mathcal{J}^2/2 \rangle$", fontsize=8)
        ax_in.tick_params(labelsize=7)
        ax_in.legend(fontsize=7)
    fig.tight_layout()
    return fig


def build_fig6(res: ResultDir):
    """dP_max as the pulse period is scanned across the Talbot time."""
    res.require("fig6")
    ok = res.ok_mask()
    tps = np.unique(res.column("t_p_s")[ok])
    fig, ax = plt.subplots(figsize=(7, 5))
    markers = ["o", "s", "^", "d"]
    for i, tp in enumerate(tps):
        sel = ok & (res.column("t_p_s") == tp)
        order = np.argsort(res.column("period_s")[sel])
        ax.plot(res.column("period_s")[sel][order] * 1e6,
                res.column("dp_max_recoil")[sel][order],
                marker=markers[i % len(markers)], ms=4,
                label=f"$t_p$ = {tp*1e9:.0f} ns")
    t_t = res.sidecar.get("talbot_time_s")
    if t_t:
        ax.axvline(t_t * 1e6, color="gray", linestyle="--", lw=1, label="$T_T$")
    ax.set_xlabel(r"pulse period $T$ [$\mu$s]")
    ax.set_ylabel(r"$\Delta P_{max}$ [$\hbar k_L$]")
    ax.legend()
    fig.tight_layout()
    return fig


BUILDERS = {
    "fig2": build_fig2,
    "fig3": build_fig3,
    "fig4": build_fig4,
    "fig5": build_fig5,
    "fig6": build_fig6,
}


def render(figure_id: str, in_dir, out_path) -> Path:
    """Build one figure from a result directory and write the image file."""
    if figure_id not in BUILDERS:
        raise SchemaError(f"unknown figure id {figure_id!r}; expected one of {sorted(BUILDERS)}")
    res = ResultDir(in_dir)
    fig = BUILDERS[figure_id](res)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, metadata={"Software": "figs"})
    plt.close(fig)
    return out_path
