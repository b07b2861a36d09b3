"""Figure renderer for cavity-array simulation outputs."""

__version__ = "0.1.0"

from .recipes import RECIPES, FigureRecipe, recipe_for  # noqa: F401
from .render import SchemaError, render_figure  # noqa: F401
