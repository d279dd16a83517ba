import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from django.conf import settings

from coefficients.calculator import coefficients
from dynamics.hamiltonian import build_heff, hamiltonian_for
from dynamics.modes import ModeClassification, ModeReport, dark_modes, dark_residual
from dynamics.propagation import Trajectory
from experiments.search import golden_section
from experiments.sweeps import ExperimentException
from layouts.geometry import (ChiralitySpec, InitialState, INITIAL_STATES, LayoutConfiguration,
                              ensure_valid, rates_from_chirality)


logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
ZERO_TOL = 1e-9
ROOT_TOL = 1e-10
MIN_DARK_OVERLAP = 1e-6
# Grid minima above this are not worth refining
CANDIDATE_CEILING = 1e-2
DUPLICATE_TOL = 1e-6
# Dark candidates within this many grid steps of a Decoupled or DecoherenceFree root are dropped
ECHO_STEPS = 2


class PhaseKind(str, enum.Enum):
    DECOUPLED = "decoupled"
    DECOHERENCE_FREE = "decoherence_free"
    DARK_STATE = "dark_state"


KIND_ORDER = (PhaseKind.DECOUPLED, PhaseKind.DECOHERENCE_FREE, PhaseKind.DARK_STATE)


@dataclass(frozen=True)
class SteadyStateReport:
    is_steady: bool
    c_ss: float
    settle_time: float
    mode: ModeReport


@dataclass(frozen=True)
class SpecialPhase:
    phi: float
    kind: PhaseKind


def detect_steady(traj: Trajectory, window: Optional[float] = None, tol: Optional[float] = None,
                  horizon: Optional[float] = None) -> SteadyStateReport:
    """
    Look for a concurrence plateau and check it against the dark-mode prediction.

    A plateau starts at the first sampled T with max - min of C over [T, T + window] below
    tol and C(T) above tol. It only counts as steady when the mode analysis finds a single
    non-decaying mode predicting the same value within 2 tol.

    :param traj: trajectory produced by dynamics.propagation.trajectory
    :param horizon: latest plateau start to try, defaults to the trajectory end minus the window

    """
    defaults = settings.SIMULATION
    window = defaults['STEADY_WINDOW'] if window is None else window
    tol = defaults['STEADY_TOL'] if tol is None else tol

    if traj.hamiltonian is None or traj.initial is None:
        raise ExperimentException("Steady-state detection needs the trajectory's Hamiltonian and initial state")
    if not (window > 0 and tol > 0):
        raise ExperimentException(f"Window and tolerance must be positive, got {window}, {tol}")

    times, values = traj.times, traj.concurrence
    span = times[-1] - times[0]
    if span < window:
        raise ExperimentException(f"Trajectory covers {span}, shorter than the window {window}")
    if horizon is None:
        horizon = times[-1] - window
    elif times[-1] < horizon + window:
        raise ExperimentException(f"Trajectory ends at {times[-1]}, before horizon + window = {horizon + window}")

    mode = dark_modes(traj.hamiltonian, traj.initial)

    unbacked = None
    for start in range(times.size):
        settle_time = times[start]
        if settle_time > horizon:
            break
        if values[start] <= tol:
            continue

        stop = int(np.searchsorted(times, settle_time + window, side="right"))
        segment = values[start:stop]
        if segment.max() - segment.min() >= tol:
            continue

        c_ss = float(segment.mean())
        agrees = mode.classification is ModeClassification.STEADY_PLATEAU \
            and abs(c_ss - mode.predicted_c_ss) < 2 * tol
        if agrees:
            return SteadyStateReport(True, c_ss, float(settle_time), mode)
        if unbacked is None:
            logger.warning("Plateau C=%.6f at t=%.4f is not backed by a dark mode (%s, predicted %s)",
                           c_ss, settle_time, mode.classification.value, mode.predicted_c_ss)
            unbacked = SteadyStateReport(False, c_ss, float(settle_time), mode)

    # A transient plateau that never matches the dark mode is reported, but not as steady
    if unbacked is not None:
        return unbacked
    return SteadyStateReport(False, 0.0, float("nan"), mode)


def _wrap(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0:
        phi += TWO_PI
    if TWO_PI - phi < DUPLICATE_TOL:
        phi = 0.0
    return phi


def _circular_distance(first: float, second: float) -> float:
    gap = abs(first - second)
    return min(gap, TWO_PI - gap)


def _local_minima(residual: np.ndarray) -> np.ndarray:
    previous, following = np.roll(residual, 1), np.roll(residual, -1)
    minima = (residual <= previous) & (residual <= following) \
        & ((residual < previous) | (residual < following)) & (residual < CANDIDATE_CEILING)
    return np.flatnonzero(minima)


def find_special_phases(cfg: LayoutConfiguration, chirality: ChiralitySpec,
                        c0: Optional[InitialState] = None, points: Optional[int] = None) -> List[SpecialPhase]:
    """
    Phases in [0, 2 pi) where the atoms decouple, interact without decay, or keep a dark mode

    Each kind has a non-negative residual that vanishes at its phases. Grid minima of the
    residual are refined by golden-section search, then the refined phase is classified;
    Decoupled takes precedence over DecoherenceFree, which takes precedence over DarkState.

    :param c0: initial state used for the dark-mode overlap, |e_a g_b> by default
    :return: phases sorted by value

    """
    ensure_valid(cfg)
    c0 = INITIAL_STATES["EG"] if c0 is None else c0
    points = settings.SIMULATION['SPECIAL_PHASE_POINTS'] if points is None else points
    gamma = chirality.gamma_total
    gamma_right, gamma_left = rates_from_chirality(chirality)

    def decay_residual(c):
        return (np.abs(c.gamma_a) + np.abs(c.gamma_b) + np.abs(c.gamma_coll)) / gamma

    def decoupled_residual(c):
        return decay_residual(c) + np.abs(c.g) / gamma

    def dark(c):
        return dark_residual(build_heff(c))

    residuals = (decoupled_residual, decay_residual, dark)

    step = TWO_PI / points
    phis = np.arange(points) * step
    grid = coefficients(cfg, phis, gamma_right, gamma_left)

    candidates = []
    for residual in residuals:
        values = residual(grid)
        for index in _local_minima(values):
            phi, _ = golden_section(lambda p: float(residual(coefficients(cfg, p, gamma_right, gamma_left))),
                                    phis[index] - step, phis[index] + step, ROOT_TOL, maximize=False)
            candidates.append(_wrap(phi))

    classified = []
    for phi in candidates:
        kind = _classify_phase(cfg, chirality, c0, phi)
        if kind is not None:
            classified.append(SpecialPhase(phi, kind))

    # Stronger kinds claim their roots first. Next to a coupling zero the dark residual
    # vanishes to high order, so dark candidates that close are echoes of that zero
    found = []
    echo_radius = max(DUPLICATE_TOL, ECHO_STEPS * step)
    for special in sorted(classified, key=lambda item: (KIND_ORDER.index(item.kind), item.phi)):
        shadowed = False
        for other in found:
            radius = DUPLICATE_TOL
            if special.kind is PhaseKind.DARK_STATE and other.kind is not PhaseKind.DARK_STATE:
                radius = echo_radius
            shadowed = shadowed or _circular_distance(special.phi, other.phi) < radius
        if not shadowed:
            found.append(special)

    logger.info("%d special phases for %s at chi=%s", len(found), cfg.ordering, chirality.chi)
    return sorted(found, key=lambda special: special.phi)


def _classify_phase(cfg, chirality, c0, phi) -> Optional[PhaseKind]:
    gamma = chirality.gamma_total
    h = hamiltonian_for(cfg, phi, chirality)
    c = h.coefficients

    decays = max(abs(c.gamma_a), abs(c.gamma_b), abs(c.gamma_coll))
    if decays < ZERO_TOL * gamma:
        if abs(c.g) < ZERO_TOL * gamma:
            return PhaseKind.DECOUPLED
        return PhaseKind.DECOHERENCE_FREE

    report = dark_modes(h, c0)
    if report.classification is ModeClassification.STEADY_PLATEAU and report.dark_overlap > MIN_DARK_OVERLAP:
        return PhaseKind.DARK_STATE
    return None
