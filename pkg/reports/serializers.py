"""
Fixed-column tables for every experiment result, written as CSV or NDJSON.

Rows are grid-major (phi outer, t inner) and floats keep 17 significant digits in
CSV and their shortest round-trip form in NDJSON, so output files are byte-identical
across runs and worker counts.

"""
import csv
import io
import json
import math
from functools import singledispatch
from typing import List, Sequence, Tuple

import numpy as np

from coefficients.calculator import CoefficientSet
from dynamics.propagation import Trajectory
from experiments.calibration import CalibrationResult, TARGET_LABELS
from experiments.search import MaxResult
from experiments.steady import SpecialPhase, SteadyStateReport
from experiments.sweeps import ChiralityScanEntry, InitialStateComparison, SweepGrid
from reports.config import ReportException
from reports.svg import render_svg_heatmap


FORMATS = ("csv", "ndjson", "svg")

TRAJECTORY_COLUMNS = ("t", "c_eg_re", "c_eg_im", "c_ge_re", "c_ge_im", "concurrence")
SWEEP_COLUMNS = ("phi", "t", "concurrence")
COEFFICIENT_COLUMNS = ("phi", "delta_a", "delta_b", "gamma_a", "gamma_b", "gcoll_re", "gcoll_im", "g_re", "g_im")
MAX_COLUMNS = ("c_max", "phi_star", "t_star", "c_eg_re", "c_eg_im", "c_ge_re", "c_ge_im")
CALIBRATION_COLUMNS = ("configuration", "ordering", "default_ordering", "confirms_default",
                       "score", "resolved") + TARGET_LABELS
SPECIAL_PHASE_COLUMNS = ("phi", "kind")
CHIRALITY_SCAN_COLUMNS = ("chi", "peak_count", "t", "concurrence")
COMPARISON_COLUMNS = ("phi", "t", "c_eg", "c_ge", "delta")
STEADY_COLUMNS = ("is_steady", "c_ss", "settle_time", "classification", "predicted_c_ss")


class SpecialPhaseTable(list):
    """
    SpecialPhase list that keeps its columns when empty

    """


class ChiralityScanTable(list):
    """
    ChiralityScanEntry list that keeps its columns when empty

    """


Table = Tuple[Sequence[str], List[tuple]]


@singledispatch
def tabulate(result) -> Table:
    raise ReportException(f"No tabular form for {type(result).__name__}")


@tabulate.register
def _(result: Trajectory) -> Table:
    rows = [(t, eg.real, eg.imag, ge.real, ge.imag, c)
            for t, eg, ge, c in zip(result.times, result.c_eg, result.c_ge, result.concurrence)]
    return TRAJECTORY_COLUMNS, rows


@tabulate.register
def _(result: SweepGrid) -> Table:
    rows = [(phi, t, result.c_matrix[i, j])
            for i, phi in enumerate(result.phi_values)
            for j, t in enumerate(result.t_values)]
    return SWEEP_COLUMNS, rows


@tabulate.register
def _(result: CoefficientSet) -> Table:
    entries = [result.at(i) for i in range(np.size(result.gamma_a))] if result.is_grid else [result]
    rows = [(math.nan if c.phi is None else c.phi, c.delta_omega_a, c.delta_omega_b, c.gamma_a, c.gamma_b,
             c.gamma_coll.real, c.gamma_coll.imag, c.g.real, c.g.imag)
            for c in entries]
    return COEFFICIENT_COLUMNS, rows


@tabulate.register
def _(result: MaxResult) -> Table:
    amplitudes = result.amplitudes_at_max
    row = (result.c_max, result.phi_star, result.t_star, amplitudes.c_eg.real, amplitudes.c_eg.imag,
           amplitudes.c_ge.real, amplitudes.c_ge.imag)
    return MAX_COLUMNS, [row]


@tabulate.register
def _(result: CalibrationResult) -> Table:
    rows = [(entry.configuration.value, entry.ordering, entry.default_ordering, entry.confirms_default,
             entry.score, entry.resolved) + tuple(entry.maxima)
            for entry in result.configurations]
    return CALIBRATION_COLUMNS, rows


@tabulate.register
def _(result: SpecialPhaseTable) -> Table:
    return SPECIAL_PHASE_COLUMNS, [(phase.phi, phase.kind.value) for phase in result]


@tabulate.register
def _(result: ChiralityScanTable) -> Table:
    rows = [(entry.chi, entry.peak_count, t, c)
            for entry in result
            for t, c in zip(entry.axis_values, entry.trajectory.concurrence)]
    return CHIRALITY_SCAN_COLUMNS, rows


@tabulate.register
def _(result: list) -> Table:
    if result and all(isinstance(item, SpecialPhase) for item in result):
        return tabulate(SpecialPhaseTable(result))
    if result and all(isinstance(item, ChiralityScanEntry) for item in result):
        return tabulate(ChiralityScanTable(result))
    raise ReportException("Cannot tell the columns of an empty or mixed list")


@tabulate.register
def _(result: InitialStateComparison) -> Table:
    grid_eg, grid_ge = result.grid_eg, result.grid_ge
    rows = []
    for i, phi in enumerate(grid_eg.phi_values):
        for j, t in enumerate(grid_eg.t_values):
            c_eg, c_ge = grid_eg.c_matrix[i, j], grid_ge.c_matrix[i, j]
            rows.append((phi, t, c_eg, c_ge, abs(c_eg - c_ge)))
    return COMPARISON_COLUMNS, rows


@tabulate.register
def _(result: SteadyStateReport) -> Table:
    predicted = result.mode.predicted_c_ss
    row = (result.is_steady, result.c_ss, result.settle_time, result.mode.classification.value,
           math.nan if predicted is None else predicted)
    return STEADY_COLUMNS, [row]


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    # + 0.0 folds -0.0 into 0
    return "%.17g" % (float(value) + 0.0)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, str):
        return value
    value = float(value) + 0.0
    return value if math.isfinite(value) else None


def serialize_results(result, fmt: str = "csv") -> bytes:
    """
    Render a result in one of FORMATS

    :param fmt: "csv", "ndjson", or "svg" for sweep grids only
    :return: UTF-8 bytes, newline terminated rows

    """
    fmt = fmt.lower()
    if fmt == "svg":
        if not isinstance(result, SweepGrid):
            raise ReportException(f"Only sweeps can be drawn as SVG, not {type(result).__name__}")
        return render_svg_heatmap(result).encode("utf-8")

    columns, rows = tabulate(result)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows([_csv_cell(value) for value in row] for row in rows)
        return buffer.getvalue().encode("utf-8")

    if fmt == "ndjson":
        lines = [json.dumps(dict(zip(columns, map(_json_value, row))), sort_keys=True, separators=(",", ":"))
                 for row in rows]
        return "".join(line + "\n" for line in lines).encode("utf-8")

    raise ReportException(f"Unknown format {fmt!r}, expected one of {', '.join(FORMATS)}")
