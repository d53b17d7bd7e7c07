"""Figure renderer for the solver's persisted CSV/JSON artifacts.

Strictly a consumer: every plotted number originates in a CSV cell; the
only derived elements are reference lines computed from the config echo
inside the manifest.
"""

from .render import FigureSpec, RenderError, RenderResult, render_report

__all__ = ["FigureSpec", "RenderError", "RenderResult", "render_report"]
__version__ = "0.1.0"
