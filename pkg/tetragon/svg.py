"""SVG drawings of the real part of a tetragonal curve.

Real branches are solid bold lines and the common real part of a pair of
conjugate branches is dotted. Singular fibers are grey vertical lines; the
special node over the improper fiber is a white dot, every other singular
point a black one. Fibers are evenly spaced: only their order matters.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.lines import Line2D  # noqa: E402
from numpy.polynomial import polynomial as P  # noqa: E402

from .exactpoly import BiPoly, coefficients, y_coefficients  # noqa: E402
from .exceptions import TetragonError  # noqa: E402
from .fiberscan import CurveDiagram  # noqa: E402

_LOGGER = logging.getLogger(__name__)

SAMPLES = 48
IMAG_TOLERANCE = 1e-7
_RC = {"svg.hashsalt": "tetragon", "svg.fonttype": "none", "font.size": 8}


class _Fiberwise:
    """Float coefficients of f(x, y) in y, as polynomials in x."""

    def __init__(self, f: BiPoly) -> None:
        self.columns = [
            np.array([float(c) for c in coefficients(a)] or [0.0]) for a in y_coefficients(f)
        ]

    def roots(self, x: float) -> np.ndarray:
        values = [P.polyval(x, column) for column in self.columns]
        return np.roots(values[::-1])


def _split(roots: np.ndarray) -> tuple[list[float], list[float]]:
    scale = max(1.0, float(np.max(np.abs(roots)))) if roots.size else 1.0
    limit = IMAG_TOLERANCE * scale
    real = sorted((float(z.real) for z in roots if abs(z.imag) <= limit), reverse=True)
    pairs = sorted((float(z.real) for z in roots if z.imag > limit), reverse=True)
    return real, pairs


def _display(y: np.ndarray | float) -> np.ndarray | float:
    return np.arcsinh(y)


def _segment_traces(
    fiberwise: _Fiberwise, start: Fraction, end: Fraction, real_count: int
) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
    xs = np.linspace(float(start), float(end), SAMPLES)
    real_rows: list[list[float]] = []
    pair_rows: list[list[float]] = []
    kept: list[float] = []
    for x in xs:
        real, pairs = _split(fiberwise.roots(float(x)))
        if len(real) != real_count:
            continue
        kept.append(float(x))
        real_rows.append(real)
        pair_rows.append(pairs)
    if not kept:
        return np.array([]), [], []
    real_array = np.array(real_rows).reshape(len(kept), real_count)
    pair_array = np.array(pair_rows).reshape(len(kept), -1)
    reals = [real_array[:, k] for k in range(real_array.shape[1])]
    pairs = [pair_array[:, k] for k in range(pair_array.shape[1])]
    return np.array(kept), reals, pairs


def _marker(face: str, label: str) -> Line2D:
    return Line2D(
        [],
        [],
        marker="o",
        linestyle="none",
        markerfacecolor=face,
        markeredgecolor="black",
        label=label,
    )


def render_diagram(diagram: CurveDiagram, title: str = "") -> plt.Figure:
    """Draw the curve diagram into a new figure."""
    fiberwise = _Fiberwise(diagram.f)
    events = diagram.events
    fig, ax = plt.subplots(figsize=(1.6 * (len(events) + 1) + 1, 4))
    for segment in diagram.segments:
        xs, reals, pairs = _segment_traces(
            fiberwise, segment.start, segment.end, segment.real_count
        )
        if xs.size < 2:
            _LOGGER.debug("Segment %s has no drawable samples", segment.index)
            continue
        # each segment occupies one unit between consecutive fiber columns
        u = segment.index + (xs - xs[0]) / (xs[-1] - xs[0])
        for values in reals:
            ax.plot(u, _display(values), color="black", linewidth=2, solid_capstyle="round")
        for values in pairs:
            ax.plot(u, _display(values), color="black", linewidth=1, linestyle=":")
    for column, event in enumerate(events, start=1):
        ax.axvline(column, color="0.6", linewidth=0.6)
        for point in event.points:
            face = "white" if point.special else "black"
            ax.scatter(
                [column],
                [_display(point.y0.real)],
                s=28,
                facecolors=face,
                edgecolors="black",
                zorder=3,
            )
        ax.annotate(
            event.label,
            (column, 1.0),
            xycoords=("data", "axes fraction"),
            ha="center",
            va="bottom",
        )
    ax.set_xlim(0, len(events) + 1)
    ax.set_xticks(range(1, len(events) + 1))
    ax.set_xticklabels([f"x{i}" for i in range(1, len(events) + 1)])
    ax.set_yticks([])
    ax.legend(
        handles=[
            Line2D([], [], color="black", linewidth=2, label="real branch"),
            Line2D([], [], color="black", linewidth=1, linestyle=":", label="conjugate pair"),
            _marker("white", "special node"),
            _marker("black", "singular point"),
        ],
        loc="lower left",
        frameon=False,
        fontsize=6,
    )
    if title:
        ax.set_title(title, pad=14)
    return fig


def write_svg(diagram: CurveDiagram, path: str | Path, title: str = "") -> Path:
    """Render the diagram and save it as a deterministic SVG file."""
    path = Path(path)
    with matplotlib.rc_context(_RC):
        fig = render_diagram(diagram, title)
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as err:
            raise TetragonError(f"cannot write {path}: {err.strerror}") from err
        finally:
            plt.close(fig)
    _LOGGER.info("Wrote %s", path)
    return path
