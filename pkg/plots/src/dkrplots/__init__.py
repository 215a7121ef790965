"""Figure rendering for dkrotor CSV outputs."""

from .figspec import FigureSpec, FigureSpecError
from .render import render, render_energy, render_portrait, render_scaling

__version__ = "0.1.0"
