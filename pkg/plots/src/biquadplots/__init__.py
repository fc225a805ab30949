"""Figure generation for bi-quadcopter simulation CSV logs."""
from .figures import FIGURE_KINDS, FigureSpec, PlotError, load_log, plot, render

__all__ = ["FIGURE_KINDS", "FigureSpec", "PlotError", "load_log", "plot",
           "render"]
