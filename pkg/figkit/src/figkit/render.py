"""Rendering: CSV tables in, image files out.

Inputs are never modified and rendering is idempotent; SVG output is
byte-stable (fixed hash salt, no embedded dates), so re-rendering a figure
from the same data reproduces the file exactly.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figkit"

import matplotlib.pyplot as plt
import numpy as np

from .recipes import FigureRecipe


class SchemaError(ValueError):
    """Input CSV does not provide the columns the recipe needs."""


def read_table(path):
    """(columns, float array) from a simulation CSV."""
    if not os.path.exists(path):
        raise SchemaError(f"{path}: input file missing")
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file, no header row")
    columns = lines[0].split(",")
    if len(lines) == 1:
        raise SchemaError(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric cell ({exc})")
    if data.shape[1] != len(columns):
        raise SchemaError(f"{path}: ragged rows vs {len(columns)} columns")
    return columns, data


def _require(columns, names, path):
    missing = [n for n in names if n not in columns]
    if missing:
        raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")


def _level_columns(columns, suffix=""):
    picked = []
    for name in columns:
        if not name.startswith("w") or not name.endswith("0" + suffix):
            continue
        core = name[1:len(name) - len(suffix)] if suffix else name[1:]
        if core.endswith("0") and core[:-1].isdigit():
            picked.append(name)
    return picked


def _new_figure(n_rows=1, height=3.2):
    fig, axes = plt.subplots(n_rows, 1, figsize=(6.4, height * n_rows),
                             squeeze=False)
    return fig, [ax for (ax,) in axes]


def _render_levels(recipe, tables, out_path):
    path, (columns, data) = tables[0]
    _require(columns, ["omega_q"], path)
    levels = _level_columns(columns)
    if not levels:
        raise SchemaError(f"{path}: missing columns: w10..wN0")
    fig, (ax,) = _new_figure(height=4.2)
    x = data[:, columns.index("omega_q")]
    for name in levels:
        ax.plot(x, data[:, columns.index(name)], color="tab:red", lw=1.1)
    ax.set_xlim(x[0], x[-1])
    _finish(fig, ax, recipe, out_path)


def _render_levels_compare(recipe, tables, out_path):
    path, (columns, data) = tables[0]
    _require(columns, ["omega_q"], path)
    primary = [n for n in _level_columns(columns) if not n.endswith("_same")]
    secondary = _level_columns(columns, suffix="_same")
    if not primary or not secondary:
        raise SchemaError(
            f"{path}: missing columns: w10..wN0 plus w10_same..wN0_same")
    fig, axes = _new_figure(n_rows=2)
    x = data[:, columns.index("omega_q")]
    for name in primary:
        axes[0].plot(x, data[:, columns.index(name)], color="tab:red",
                     ls="solid", lw=1.1)
    for name in secondary:
        axes[1].plot(x, data[:, columns.index(name)], color="tab:blue",
                     ls="dashed", lw=1.1)
    axes[0].set_title("opposite coupling phases", fontsize=9)
    axes[1].set_title("equal coupling phases", fontsize=9)
    for ax in axes:
        ax.set_xlim(x[0], x[-1])
        ax.set_ylabel(recipe.y_label)
    axes[1].set_xlabel(recipe.x_label)
    fig.suptitle(recipe.title, fontsize=10)
    _save(fig, out_path)


def _render_trajectory(recipe, tables, out_path):
    path, (columns, data) = tables[0]
    needed = ["time"] + [s.column for s in recipe.series]
    _require(columns, needed, path)
    fig, (ax,) = _new_figure()
    t = data[:, columns.index("time")]
    for style in recipe.series:
        ax.plot(t, data[:, columns.index(style.column)], label=style.label,
                color=style.color, ls=style.linestyle, lw=1.2)
    ax.set_xlim(t[0], t[-1])
    ax.set_ylim(-0.02, 1.05)
    ax.legend(loc="upper right", fontsize=8)
    _finish(fig, ax, recipe, out_path)


def _render_profile_density(recipe, tables, out_path):
    path, (columns, data) = tables[0]
    mode_cols = {m: [f"{m}_c{n}" for n in (1, 2, 3)] for m in ("s1", "a", "s2")}
    _require(columns, ["delta"] + sum(mode_cols.values(), []), path)
    delta = data[:, columns.index("delta")]
    fig, axes = _new_figure(n_rows=3, height=2.0)
    titles = {"s1": "lower symmetric mode", "a": "antisymmetric mode",
              "s2": "upper symmetric mode"}
    for ax, mode in zip(axes, ("s1", "a", "s2")):
        weights = np.array(
            [data[:, columns.index(c)] ** 2 for c in mode_cols[mode]])
        im = ax.imshow(weights, aspect="auto", origin="lower",
                       extent=(delta[0], delta[-1], 0.5, 3.5),
                       vmin=0.0, vmax=1.0, cmap="viridis",
                       interpolation="nearest")
        ax.set_yticks([1, 2, 3])
        ax.set_ylabel(recipe.y_label, fontsize=8)
        ax.set_title(titles[mode], fontsize=9)
    fig.colorbar(im, ax=axes, fraction=0.03, label="site weight")
    axes[-1].set_xlabel(recipe.x_label)
    fig.suptitle(recipe.title, fontsize=10)
    _save(fig, out_path, tight=False)


def _finish(fig, ax, recipe, out_path):
    ax.set_xlabel(recipe.x_label)
    ax.set_ylabel(recipe.y_label)
    ax.set_title(recipe.title, fontsize=10)
    _save(fig, out_path)


def _save(fig, out_path, tight=True):
    if tight:
        fig.tight_layout()
    kwargs = {}
    if str(out_path).lower().endswith(".svg"):
        kwargs["metadata"] = {"Date": None}   # byte-stable output
    fig.savefig(out_path, dpi=150, **kwargs)
    plt.close(fig)


_RENDERERS = {
    "levels": _render_levels,
    "levels_compare": _render_levels_compare,
    "trajectory": _render_trajectory,
    "profile_density": _render_profile_density,
}


def render_figure(recipe: FigureRecipe, data_dir, out_path) -> str:
    """Render one recipe from CSVs in ``data_dir`` to ``out_path``."""
    tables = []
    for name in recipe.inputs:
        path = os.path.join(data_dir, name)
        tables.append((path, read_table(path)))
    _RENDERERS[recipe.kind](recipe, tables, out_path)
    return str(out_path)
