"""Figure recipes: which CSV inputs each canonical figure needs and how its
curves are styled (line styles mirror the source captions: solid / dashed /
dot-dashed / dotted families)."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SeriesStyle:
    column: str
    label: str
    color: str
    linestyle: str


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    kind: str                     # levels | levels_compare | trajectory | profile_density
    inputs: tuple[str, ...]
    title: str
    series: tuple[SeriesStyle, ...] = field(default_factory=tuple)
    x_label: str = ""
    y_label: str = ""


def _trajectory(figure_id, title, series):
    return FigureRecipe(
        figure_id=figure_id, kind="trajectory",
        inputs=(f"{figure_id}.csv",), title=title,
        series=tuple(SeriesStyle(*s) for s in series),
        x_label=r"$\omega_c t$", y_label="occupation probability")


RECIPES: dict[str, FigureRecipe] = {
    "fig2a": FigureRecipe(
        figure_id="fig2a", kind="levels", inputs=("fig2a.csv",),
        title="Two-cavity dressed levels",
        x_label=r"$\omega_q/\omega_c$", y_label=r"$\omega_{i0}/\omega_c$"),
    "fig2b": FigureRecipe(
        figure_id="fig2b", kind="levels_compare", inputs=("fig2b.csv",),
        title="Anticrossing region: opposite vs equal coupling phases",
        x_label=r"$\omega_q/\omega_c$", y_label=r"$\omega_{i0}/\omega_c$"),
    "fig3a": _trajectory(
        "fig3a", "Joint absorption of an antisymmetric photon",
        [("p_1a", r"$P^{(1_A)}$", "tab:red", "solid"),
         ("p_11", r"$P^{(1_1)}$", "tab:blue", "dashdot"),
         ("p_ee", r"$P^{(ee)}$", "black", "dashed")]),
    "fig3b": _trajectory(
        "fig3b", "Narrow Gaussian pulse feeding cavity 1",
        [("p_1a", r"$P^{(1_A)}$", "tab:red", "solid"),
         ("p_11", r"$P^{(1_1)}$", "tab:blue", "dashdot"),
         ("p_ee", r"$P^{(ee)}$", "black", "dashed")]),
    "fig4a": _trajectory(
        "fig4a", "Photon initially localized in cavity 1",
        [("p_11", r"$P^{(1_1)}$", "tab:red", "solid"),
         ("p_12", r"$P^{(1_2)}$", "tab:blue", "dotted"),
         ("p_ee", r"$P^{(ee)}$", "black", "dashdot")]),
    "fig4b": _trajectory(
        "fig4b", "Broad Gaussian pulse feeding cavity 1",
        [("p_11", r"$P^{(1_1)}$", "tab:red", "solid"),
         ("p_12", r"$P^{(1_2)}$", "tab:blue", "dotted"),
         ("p_ee", r"$P^{(ee)}$", "black", "dashdot")]),
    "fig5b": FigureRecipe(
        figure_id="fig5b", kind="profile_density", inputs=("fig5b.csv",),
        title="Normal-mode spatial profiles vs central-cavity detuning",
        x_label=r"$\Delta/\omega_c$", y_label="cavity index"),
    "fig6": FigureRecipe(
        figure_id="fig6", kind="levels", inputs=("fig6.csv",),
        title="Three-cavity dressed levels",
        x_label=r"$\omega_q/\omega_c$", y_label=r"$\omega_{i0}/\omega_c$"),
    "fig7a": _trajectory(
        "fig7a", "Three cavities: joint absorption of an antisymmetric photon",
        [("p_1a", r"$P^{(1_A)}$", "tab:red", "solid"),
         ("p_11", r"$P^{(1_1)}$", "tab:blue", "dashdot"),
         ("p_ee", r"$P^{(ee)}$", "black", "dashed")]),
    "fig7b": _trajectory(
        "fig7b", "Three cavities: photon hopping from cavity 1",
        [("p_11", r"$P^{(1_1)}$", "tab:blue", "solid"),
         ("p_12", r"$P^{(1_2)}$", "tab:green", "dashed"),
         ("p_13", r"$P^{(1_3)}$", "tab:red", "dashdot"),
         ("p_ee", r"$P^{(ee)}$", "black", "dotted")]),
    "fig7c": _trajectory(
        "fig7c", "Three cavities with a detuned central cavity",
        [("p_11", r"$P^{(1_1)}$", "tab:blue", "solid"),
         ("p_12", r"$P^{(1_2)}$", "tab:green", "dashed"),
         ("p_13", r"$P^{(1_3)}$", "tab:red", "dashdot"),
         ("p_ee", r"$P^{(ee)}$", "black", "dotted")]),
}


def recipe_for(figure_id: str) -> FigureRecipe:
    try:
        return RECIPES[figure_id]
    except KeyError:
        known = ", ".join(sorted(RECIPES))
        raise KeyError(f"unknown figure id {figure_id!r}; known: {known}")
