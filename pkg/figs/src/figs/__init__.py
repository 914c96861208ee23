"""Figure rendering for kickedatom result directories."""

__version__ = "0.1.0"

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6")
