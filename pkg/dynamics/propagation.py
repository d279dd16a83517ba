import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from dynamics.hamiltonian import DynamicsException, EffectiveHamiltonian
from layouts.geometry import InitialState


logger = logging.getLogger(__name__)

# Below this |s t| the cos/sinc form is used, which is also the confluent limit at s = 0
SERIES_THRESHOLD = 1.0
SINC_SERIES = 1e-8


@dataclass(frozen=True)
class AmplitudePair:
    c_eg: complex
    c_ge: complex


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    c_eg: np.ndarray
    c_ge: np.ndarray
    concurrence: np.ndarray
    hamiltonian: Optional[EffectiveHamiltonian] = None
    initial: Optional[InitialState] = None

    @property
    def states(self) -> List[AmplitudePair]:
        return [AmplitudePair(complex(eg), complex(ge)) for eg, ge in zip(self.c_eg, self.c_ge)]

    def __len__(self):
        return len(self.times)


def concurrence_of(c_eg, c_ge):
    return 2 * np.abs(c_eg) * np.abs(c_ge)


def concurrence(c: AmplitudePair) -> float:
    return float(concurrence_of(c.c_eg, c.c_ge))


def evolve_amplitudes(m, c0: InitialState, times):
    """
    Exact amplitudes exp(-i m t) c0 for every matrix in ``m`` and every time in ``times``.

    exp(-i m t) = C I - i S (m - tau I) with tau = tr(m)/2, s^2 = ((m11 - m22)/2)^2 + m12 m21,
    C = e^{-i tau t} cos(s t) and S = e^{-i tau t} sin(s t)/s. Both are even in s, so the
    branch of the square root does not matter.

    :param m: array of shape (..., 2, 2)
    :param c0: initial amplitudes
    :param times: scalar or array of times
    :return: (c_eg, c_ge) arrays of shape m.shape[:-2] + times.shape

    """
    m = np.asarray(m, dtype=complex)
    times = np.asarray(times, dtype=float)
    expand = (Ellipsis,) + (np.newaxis,) * times.ndim

    m11, m12 = m[..., 0, 0][expand], m[..., 0, 1][expand]
    m21, m22 = m[..., 1, 0][expand], m[..., 1, 1][expand]

    tau = (m11 + m22) / 2
    half = (m11 - m22) / 2
    s = np.sqrt(half * half + m12 * m21)
    z = s * times

    with np.errstate(all="ignore"):
        phase = np.exp(-1j * tau * times)
        sinc = np.where(np.abs(z) < SINC_SERIES, 1 - z * z / 6, np.sin(z) / z)
        cos_series = phase * np.cos(z)
        sin_series = phase * times * sinc

        e_plus = np.exp(-1j * (tau + s) * times)
        e_minus = np.exp(-1j * (tau - s) * times)
        cos_modes = (e_plus + e_minus) / 2
        sin_modes = (e_minus - e_plus) / (2j * s)

        series = np.abs(z) < SERIES_THRESHOLD
        cos_part = np.where(series, cos_series, cos_modes)
        sin_part = np.where(series, sin_series, sin_modes)

    c1, c2 = c0.c_eg0, c0.c_ge0
    c_eg = cos_part * c1 - 1j * sin_part * (half * c1 + m12 * c2)
    c_ge = cos_part * c2 - 1j * sin_part * (m21 * c1 - half * c2)
    return c_eg, c_ge


def propagate_closed(h: EffectiveHamiltonian, c0: InitialState, t: float) -> AmplitudePair:
    if not t >= 0:
        raise DynamicsException(f"Propagation time must be non-negative, got {t}")

    c_eg, c_ge = evolve_amplitudes(h.m, c0, t)
    return AmplitudePair(complex(c_eg), complex(c_ge))


def _check_times(t_grid) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise DynamicsException("Time grid must be a non-empty list of times")
    if not np.all(np.isfinite(t_grid)):
        raise DynamicsException("Time grid must be finite")
    if t_grid[0] < 0:
        raise DynamicsException(f"Time grid must start at t >= 0, got {t_grid[0]}")
    if np.any(np.diff(t_grid) <= 0):
        raise DynamicsException("Time grid must be strictly increasing")
    return t_grid


def trajectory(h: EffectiveHamiltonian, c0: InitialState, t_grid) -> Trajectory:
    """
    Exact trajectory on a time grid, every point propagated independently from t = 0

    """
    times = _check_times(t_grid)
    c_eg, c_ge = evolve_amplitudes(h.m, c0, times)
    return Trajectory(times, c_eg, c_ge, concurrence_of(c_eg, c_ge), h, c0)


def rk4_integrate(matrices, states, t_samples, dt: float) -> np.ndarray:
    """
    Fixed-step classical Runge-Kutta for i dc/dt = m c, many systems at once.

    The step before each sample time is shortened to land on it exactly.

    :param matrices: array (N, 2, 2)
    :param states: array (N, 2) of amplitudes at t = 0
    :param t_samples: non-decreasing sample times, first one >= 0
    :param dt: nominal step
    :return: array (N, len(t_samples), 2)

    """
    matrices = np.asarray(matrices, dtype=complex)
    c = np.array(states, dtype=complex)
    t_samples = np.asarray(t_samples, dtype=float)

    if not (math.isfinite(dt) and dt > 0):
        raise DynamicsException(f"Step must be positive and finite, got {dt}")
    if not (np.all(np.isfinite(matrices)) and np.all(np.isfinite(c)) and np.all(np.isfinite(t_samples))):
        raise DynamicsException("Numerical integration needs finite inputs")
    if t_samples.size and (t_samples[0] < 0 or np.any(np.diff(t_samples) < 0)):
        raise DynamicsException("Sample times must be non-negative and sorted")

    def rhs(amplitudes):
        return -1j * np.einsum("nij,nj->ni", matrices, amplitudes)

    samples = np.empty((c.shape[0], t_samples.size, 2), dtype=complex)
    t = 0.0
    for k, target in enumerate(t_samples):
        while t < target:
            step = min(dt, target - t)
            k1 = rhs(c)
            k2 = rhs(c + step / 2 * k1)
            k3 = rhs(c + step / 2 * k2)
            k4 = rhs(c + step * k3)
            c = c + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t = target if step == target - t else t + step
        samples[:, k, :] = c

    logger.debug("RK4 integrated %d systems up to t=%s with dt=%s", c.shape[0], t, dt)
    return samples


def propagate_numeric(h: EffectiveHamiltonian, c0: InitialState, t: float, dt: float) -> AmplitudePair:
    if not (math.isfinite(t) and t >= 0):
        raise DynamicsException(f"Propagation time must be finite and non-negative, got {t}")

    samples = rk4_integrate(h.m[np.newaxis], [[c0.c_eg0, c0.c_ge0]], [t], dt)
    return AmplitudePair(complex(samples[0, 0, 0]), complex(samples[0, 0, 1]))


def trajectory_numeric(h: EffectiveHamiltonian, c0: InitialState, t_grid, dt: float) -> Trajectory:
    times = _check_times(t_grid)
    samples = rk4_integrate(h.m[np.newaxis], [[c0.c_eg0, c0.c_ge0]], times, dt)
    c_eg, c_ge = samples[0, :, 0], samples[0, :, 1]
    return Trajectory(times, c_eg, c_ge, concurrence_of(c_eg, c_ge), h, c0)
