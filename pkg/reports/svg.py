import logging
import math
from typing import Sequence, Tuple

import numpy as np
from django.template.loader import render_to_string
from django.utils.safestring import mark_safe

from experiments.sweeps import SweepGrid
from reports.config import ReportException


logger = logging.getLogger(__name__)

RGB = Tuple[int, int, int]

# Colours at C = 0, 0.5 and 1
DEFAULT_COLORMAP = ((13, 8, 135), (204, 71, 120), (240, 249, 33))

MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 20
MARGIN_BOTTOM = 50


def color_for(value: float, colormap: Sequence[RGB] = DEFAULT_COLORMAP) -> RGB:
    """
    Piecewise linear colour between equally spaced anchors, value clipped to [0, 1]

    """
    value = min(max(float(value), 0.0), 1.0)
    segments = len(colormap) - 1
    position = value * segments
    index = min(int(position), segments - 1)
    fraction = position - index
    low, high = colormap[index], colormap[index + 1]
    return tuple(int(round(a + (b - a) * fraction)) for a, b in zip(low, high))


def _coordinate(value: float) -> str:
    return f"{value:.3f}"


def _tick_label(value: float) -> str:
    return f"{value + 0.0:.4g}"


def render_svg_heatmap(grid: SweepGrid, width: int = 640, height: int = 480,
                       colormap: Sequence[RGB] = DEFAULT_COLORMAP) -> str:
    """
    Heatmap of C(t, phi): gamma t on the horizontal axis, phi/pi on the vertical one

    One rectangle per cell, phases increasing upwards. Ticks sit at the grid bounds.

    """
    c_matrix = np.asarray(grid.c_matrix, dtype=float)
    if c_matrix.size == 0 or c_matrix.ndim != 2:
        raise ReportException("Cannot draw an empty sweep grid")

    rows, columns = c_matrix.shape
    plot_width = width - MARGIN_LEFT - MARGIN_RIGHT
    plot_height = height - MARGIN_TOP - MARGIN_BOTTOM
    if plot_width <= 0 or plot_height <= 0:
        raise ReportException(f"Image {width}x{height} leaves no room for the plot")

    cell_width = plot_width / columns
    cell_height = plot_height / rows
    logger.debug("Drawing %d x %d cells", rows, columns)

    cells = []
    for i in range(rows):
        y = MARGIN_TOP + (rows - 1 - i) * cell_height
        for j in range(columns):
            r, g, b = color_for(c_matrix[i, j], colormap)
            cells.append(f'<rect class="cell" x="{_coordinate(MARGIN_LEFT + j * cell_width)}" '
                         f'y="{_coordinate(y)}" width="{_coordinate(cell_width)}" '
                         f'height="{_coordinate(cell_height)}" fill="rgb({r},{g},{b})"/>')

    bottom = MARGIN_TOP + plot_height
    right = MARGIN_LEFT + plot_width
    t_values, phi_values = grid.t_values, grid.phi_values
    x_ticks = [{"position": _coordinate(MARGIN_LEFT + cell_width / 2), "label": _tick_label(t_values[0])}]
    y_ticks = [{"position": _coordinate(bottom - cell_height / 2), "label": _tick_label(phi_values[0] / math.pi)}]
    if columns > 1:
        x_ticks.append({"position": _coordinate(right - cell_width / 2), "label": _tick_label(t_values[-1])})
    if rows > 1:
        y_ticks.append({"position": _coordinate(MARGIN_TOP + cell_height / 2),
                        "label": _tick_label(phi_values[-1] / math.pi)})

    context = {
        "width": width,
        "height": height,
        "title": f"{grid.layout_tag} ({grid.ordering}), chi={grid.chi:g}",
        "cells": mark_safe("\n".join(cells)),
        "left": MARGIN_LEFT,
        "top": MARGIN_TOP,
        "right": right,
        "bottom": bottom,
        "plot_width": plot_width,
        "plot_height": plot_height,
        "x_ticks": x_ticks,
        "y_ticks": y_ticks,
        "x_label_x": _coordinate(MARGIN_LEFT + plot_width / 2),
        "x_label_y": height - 10,
        "y_label_y": _coordinate(MARGIN_TOP + plot_height / 2),
    }
    return render_to_string("reports/heatmap.svg", context)
