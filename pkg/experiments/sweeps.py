import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from dynamics.hamiltonian import hamiltonian_for
from dynamics.propagation import (Trajectory, concurrence_of, evolve_amplitudes, trajectory,
                                  trajectory_numeric)
from layouts.geometry import (ChiralitySpec, InitialState, INITIAL_STATES, LayoutConfiguration,
                              ensure_valid, rates_from_chirality)


logger = logging.getLogger(__name__)

# Upper bound on (phi, t) cells propagated in one vectorised block
CELLS_PER_BLOCK = 1 << 18
PEAK_THRESHOLD = 1 - 1e-3


class ExperimentException(Exception):
    pass


@dataclass(eq=False)
class SweepGrid:
    phi_values: np.ndarray
    t_values: np.ndarray
    c_matrix: np.ndarray
    layout_tag: str
    ordering: str
    chi: float
    gamma_total: float
    initial: InitialState


@dataclass(eq=False)
class InitialStateComparison:
    grid_eg: SweepGrid
    grid_ge: SweepGrid
    max_delta: float


@dataclass(eq=False)
class ChiralityScanEntry:
    chi: float
    trajectory: Trajectory
    peak_count: int
    # Grid as given by the caller: gamma t, or gamma_R t for the "gamma_r" axis
    axis_values: np.ndarray


def check_grid(values, name: str, strict: bool = False) -> np.ndarray:
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.ndim != 1 or values.size == 0:
        raise ExperimentException(f"{name} grid must be a non-empty list")
    if not np.all(np.isfinite(values)):
        raise ExperimentException(f"{name} grid must be finite")

    steps = np.diff(values)
    if np.any(steps < 0) or (strict and np.any(steps == 0)):
        raise ExperimentException(f"{name} grid must be sorted{' strictly' if strict else ''}")
    return values


def concurrence_grid(cfg: LayoutConfiguration, chirality: ChiralitySpec, c0: InitialState,
                     phi_values, t_values) -> np.ndarray:
    """
    C(t_j; phi_i) for every cell, propagated exactly in blocks of phase rows

    """
    phi_values = np.asarray(phi_values, dtype=float)
    t_values = np.asarray(t_values, dtype=float)
    rows = max(1, CELLS_PER_BLOCK // max(1, t_values.size))

    c_matrix = np.empty((phi_values.size, t_values.size))
    for start in range(0, phi_values.size, rows):
        block = phi_values[start:start + rows]
        h = hamiltonian_for(cfg, block, chirality)
        c_eg, c_ge = evolve_amplitudes(h.m, c0, t_values)
        c_matrix[start:start + rows] = concurrence_of(c_eg, c_ge)
    return c_matrix


def sweep(cfg: LayoutConfiguration, chirality: ChiralitySpec, c0: InitialState,
          phi_grid, t_grid) -> SweepGrid:
    ensure_valid(cfg)
    rates_from_chirality(chirality)
    phi_values = check_grid(phi_grid, "phi")
    t_values = check_grid(t_grid, "time", strict=True)
    if t_values[0] < 0:
        raise ExperimentException("time grid must start at t >= 0")

    logger.info("Sweeping %s over %d phases x %d times", cfg.ordering, phi_values.size, t_values.size)
    c_matrix = concurrence_grid(cfg, chirality, c0, phi_values, t_values)
    return SweepGrid(phi_values, t_values, c_matrix, cfg.preset_tag.value, cfg.ordering,
                     chirality.chi, chirality.gamma_total, c0)


def compare_initial_states(cfg: LayoutConfiguration, chirality: ChiralitySpec,
                           phi_grid, t_grid) -> InitialStateComparison:
    grid_eg = sweep(cfg, chirality, INITIAL_STATES["EG"], phi_grid, t_grid)
    grid_ge = sweep(cfg, chirality, INITIAL_STATES["GE"], phi_grid, t_grid)
    max_delta = float(np.max(np.abs(grid_eg.c_matrix - grid_ge.c_matrix)))
    return InitialStateComparison(grid_eg, grid_ge, max_delta)


def count_peaks(values, threshold: float = PEAK_THRESHOLD) -> int:
    """
    Number of strict interior local maxima above the threshold

    """
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return 0
    middle = values[1:-1]
    peaks = (middle > values[:-2]) & (middle >= values[2:]) & (middle > threshold)
    return int(np.count_nonzero(peaks))


def chirality_scan(cfg: LayoutConfiguration, phi: float, chi_list, c0: InitialState, t_grid,
                   gamma_total: float = 1.0, time_axis: str = "gamma") -> List[ChiralityScanEntry]:
    """
    One trajectory per chirality at fixed phase and fixed gamma_total

    :param time_axis: "gamma" when t_grid is in units of 1/gamma_total, "gamma_r" when it is
                      gamma_R t, converted per chi with gamma_R = gamma (1 + chi) / 2
    :return: entries in the order of chi_list

    """
    ensure_valid(cfg)
    axis_values = check_grid(t_grid, "time", strict=True)
    if time_axis not in ("gamma", "gamma_r"):
        raise ExperimentException(f"Unknown time axis {time_axis!r}, expected 'gamma' or 'gamma_r'")

    entries = []
    for chi in chi_list:
        chirality = ChiralitySpec(gamma_total, float(chi))
        gamma_right, _ = rates_from_chirality(chirality)
        times = axis_values / gamma_right if time_axis == "gamma_r" else axis_values

        traj = trajectory(hamiltonian_for(cfg, phi, chirality), c0, times)
        entries.append(ChiralityScanEntry(float(chi), traj, count_peaks(traj.concurrence), axis_values))
        logger.debug("chi=%s: %d peaks", chi, entries[-1].peak_count)
    return entries


def single_trajectory(cfg: LayoutConfiguration, chirality: ChiralitySpec, c0: InitialState,
                      phi: float, t_grid, dt: Optional[float] = None) -> Trajectory:
    """
    Trajectory at one phase, exact by default or by RK4 when a step is given

    """
    ensure_valid(cfg)
    h = hamiltonian_for(cfg, phi, chirality)
    if dt is None:
        return trajectory(h, c0, t_grid)
    return trajectory_numeric(h, c0, t_grid, dt)
