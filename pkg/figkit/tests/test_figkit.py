import numpy as np
import pytest

from figkit.cli import main
from figkit.recipes import RECIPES, recipe_for
from figkit.render import SchemaError, read_table, render_figure


def write_csv(path, columns, rows):
    lines = [",".join(columns)]
    lines += [",".join(f"{v:.12g}" for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def synthetic_trajectory(path, columns):
    t = np.linspace(0, 100, 60)
    rows = np.column_stack(
        [t] + [0.5 + 0.5 * np.cos(t / (8 + k)) for k in range(len(columns) - 1)])
    write_csv(path, columns, rows)


def synthetic_levels(path, n_levels=4, compare=False):
    wq = np.linspace(0.4, 0.6, 30)
    cols = ["omega_q"] + [f"w{i}0" for i in range(1, n_levels)]
    blocks = [wq] + [wq * i for i in range(1, n_levels)]
    if compare:
        cols += [f"w{i}0_same" for i in range(1, n_levels)]
        blocks += [wq * i + 0.01 for i in range(1, n_levels)]
    write_csv(path, cols, np.column_stack(blocks))


def synthetic_profile(path):
    delta = np.linspace(0, 1, 20)
    cols = ["delta", "omega_s1", "omega_a", "omega_s2"]
    cols += [f"{m}_c{n}" for m in ("s1", "a", "s2") for n in (1, 2, 3)]
    rng = np.random.default_rng(3)
    mat = rng.uniform(-0.7, 0.7, size=(len(delta), 9))
    rows = np.column_stack([delta, 1 - delta / 10, np.ones_like(delta),
                            1 + delta / 10, mat])
    write_csv(path, cols, rows)


class TestRecipes:
    def test_catalog_covers_all_canonical_figures(self):
        assert sorted(RECIPES) == ["fig2a", "fig2b", "fig3a", "fig3b",
                                   "fig4a", "fig4b", "fig5b", "fig6",
                                   "fig7a", "fig7b", "fig7c"]

    def test_unknown_id(self):
        with pytest.raises(KeyError, match="unknown figure id"):
            recipe_for("fig99")


class TestReadTable:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "t.csv"
        synthetic_trajectory(path, ["time", "p_11"])
        cols, data = read_table(path)
        assert cols == ["time", "p_11"]
        assert data.shape == (60, 2)

    def test_empty_file_names_problem(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            read_table(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="missing"):
            read_table(tmp_path / "nope.csv")

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,p\n0,oops\n")
        with pytest.raises(SchemaError, match="non-numeric"):
            read_table(path)


class TestRender:
    def test_trajectory_svg(self, tmp_path):
        synthetic_trajectory(tmp_path / "fig3a.csv",
                             ["time", "p_1a", "p_11", "p_ee"])
        out = render_figure(recipe_for("fig3a"), tmp_path,
                            tmp_path / "fig3a.svg")
        body = open(out, encoding="utf-8").read()
        assert "<svg" in body

    def test_missing_column_named(self, tmp_path):
        synthetic_trajectory(tmp_path / "fig3a.csv", ["time", "p_1a", "p_11"])
        with pytest.raises(SchemaError, match="p_ee"):
            render_figure(recipe_for("fig3a"), tmp_path,
                          tmp_path / "fig3a.svg")

    def test_levels_and_compare(self, tmp_path):
        synthetic_levels(tmp_path / "fig2a.csv")
        render_figure(recipe_for("fig2a"), tmp_path, tmp_path / "a.svg")
        synthetic_levels(tmp_path / "fig2b.csv", compare=True)
        render_figure(recipe_for("fig2b"), tmp_path, tmp_path / "b.svg")
        # compare recipe demands the equal-phase family
        synthetic_levels(tmp_path / "fig2b.csv", compare=False)
        with pytest.raises(SchemaError, match="_same"):
            render_figure(recipe_for("fig2b"), tmp_path, tmp_path / "b.svg")

    def test_profile_density(self, tmp_path):
        synthetic_profile(tmp_path / "fig5b.csv")
        render_figure(recipe_for("fig5b"), tmp_path, tmp_path / "p.svg")

    def test_rendering_is_read_only_and_idempotent(self, tmp_path):
        csv_path = tmp_path / "fig4a.csv"
        synthetic_trajectory(csv_path, ["time", "p_11", "p_12", "p_ee"])
        before = csv_path.read_bytes()
        out1 = tmp_path / "one.svg"
        out2 = tmp_path / "two.svg"
        render_figure(recipe_for("fig4a"), tmp_path, out1)
        render_figure(recipe_for("fig4a"), tmp_path, out2)
        assert csv_path.read_bytes() == before
        assert out1.read_bytes() == out2.read_bytes()


class TestCli:
    def test_render_command(self, tmp_path, capsys):
        synthetic_trajectory(tmp_path / "fig7b.csv",
                             ["time", "p_11", "p_12", "p_13", "p_ee"])
        out = tmp_path / "fig7b.svg"
        assert main(["render", "fig7b", "--data", str(tmp_path),
                     "--out", str(out)]) == 0
        assert out.exists()

    def test_schema_error_exit_2(self, tmp_path, capsys):
        (tmp_path / "fig7b.csv").write_text("time\n0\n")
        assert main(["render", "fig7b", "--data", str(tmp_path),
                     "--out", str(tmp_path / "x.svg")]) == 2
        assert "p_11" in capsys.readouterr().err

    def test_unknown_figure_exit_2(self, tmp_path, capsys):
        assert main(["render", "nope", "--data", str(tmp_path),
                     "--out", str(tmp_path / "x.svg")]) == 2

    def test_list(self, capsys):
        assert main(["list"]) == 0
        assert "fig5b" in capsys.readouterr().out
