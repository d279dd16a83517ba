import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from django.conf import settings

from dynamics.hamiltonian import hamiltonian_for
from dynamics.propagation import AmplitudePair, concurrence, propagate_closed
from experiments.sweeps import ExperimentException, concurrence_grid
from layouts.geometry import ChiralitySpec, InitialState, LayoutConfiguration, ensure_valid


logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / golden ratio
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / golden ratio^2

BRACKET_TOL = 1e-6
MAX_REFINEMENT_ROUNDS = 8


@dataclass(frozen=True)
class MaxResult:
    c_max: float
    phi_star: float
    t_star: float
    amplitudes_at_max: AmplitudePair


def golden_section(f: Callable[[float], float], a: float, b: float,
                   tol: float = BRACKET_TOL, maximize: bool = True) -> Tuple[float, float]:
    """
    Golden-section search on [a, b] for a single extremum.

    Shrinks the bracket until it is narrower than tol, then returns the best of the
    two interior probes as (x, f(x)).

    """
    sign = 1.0 if maximize else -1.0
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = (a + b) / 2
        return x, f(x)

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = sign * f(c)
    yd = sign * f(d)

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = sign * f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = sign * f(d)

    if yc > yd:
        return c, sign * yc
    return d, sign * yd


def _neighbours(values: np.ndarray, index: int) -> Tuple[float, float]:
    return float(values[max(index - 1, 0)]), float(values[min(index + 1, values.size - 1)])


def find_max(cfg: LayoutConfiguration, chirality: ChiralitySpec, c0: InitialState,
             phi_range=(0.0, 2 * math.pi), t_horizon: Optional[float] = None,
             phi_points: Optional[int] = None, t_points: Optional[int] = None,
             tol: float = BRACKET_TOL) -> MaxResult:
    """
    Maximum concurrence over a phase range and [0, t_horizon]

    A coarse grid scan locates the best cell, then golden-section passes alternate in t and
    phi inside the neighbouring cells until both brackets are narrower than tol.

    :param phi_range: (start, stop); start == stop searches time only
    :return: MaxResult, never below the best coarse sample

    """
    defaults = settings.SIMULATION
    t_horizon = defaults['FIND_MAX_HORIZON'] if t_horizon is None else t_horizon
    phi_points = defaults['FIND_MAX_PHI_POINTS'] if phi_points is None else phi_points
    t_points = defaults['FIND_MAX_T_POINTS'] if t_points is None else t_points

    ensure_valid(cfg)
    if not t_horizon > 0:
        raise ExperimentException(f"Time horizon must be positive, got {t_horizon}")
    phi_low, phi_high = sorted(float(x) for x in phi_range)
    fixed_phase = phi_high == phi_low

    phis = np.array([phi_low]) if fixed_phase else np.linspace(phi_low, phi_high, max(phi_points, 2))
    times = np.linspace(0.0, t_horizon, max(t_points, 2))

    grid = concurrence_grid(cfg, chirality, c0, phis, times)
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)

    def amplitudes(phi, t):
        return propagate_closed(hamiltonian_for(cfg, phi, chirality), c0, t)

    def value(phi, t):
        return concurrence(amplitudes(phi, t))

    phi_star, t_star = float(phis[i]), float(times[j])
    coarse = (value(phi_star, t_star), phi_star, t_star)

    t_low, t_high = _neighbours(times, j)
    phi_low, phi_high = _neighbours(phis, i)
    best = coarse[0]
    for _ in range(MAX_REFINEMENT_ROUNDS):
        previous = best
        t_star, best = golden_section(lambda t: value(phi_star, t), t_low, t_high, tol)
        if not fixed_phase:
            phi_star, best = golden_section(lambda p: value(p, t_star), phi_low, phi_high, tol)
        if abs(best - previous) < 1e-12:
            break

    if best < coarse[0]:
        best, phi_star, t_star = coarse

    at_max = amplitudes(phi_star, t_star)
    logger.info("find_max %s chi=%s: C=%.6f at phi=%.6f, t=%.6f", cfg.ordering, chirality.chi,
                concurrence(at_max), phi_star, t_star)
    return MaxResult(concurrence(at_max), phi_star, t_star, at_max)
