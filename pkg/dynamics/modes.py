import enum
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from dynamics.hamiltonian import DynamicsException, EffectiveHamiltonian
from layouts.geometry import InitialState


logger = logging.getLogger(__name__)

DEFAULT_MODE_TOL = 1e-9


class ModeClassification(str, enum.Enum):
    DECAYS_TO_ZERO = "decays_to_zero"
    STEADY_PLATEAU = "steady_plateau"
    PERSISTENT_OSCILLATION = "persistent_oscillation"


@dataclass(frozen=True)
class ModeReport:
    eigenvalues: Tuple[complex, complex]
    classification: ModeClassification
    # None when the concurrence keeps oscillating
    predicted_c_ss: Optional[float]
    dark_overlap: float = 0.0


def eigenvalues_of(m) -> Tuple[np.ndarray, np.ndarray]:
    """
    Both eigenvalues tau +/- s of every 2x2 matrix in ``m`` (shape (..., 2, 2))

    """
    m = np.asarray(m, dtype=complex)
    m11, m12, m21, m22 = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    tau = (m11 + m22) / 2
    half = (m11 - m22) / 2
    s = np.sqrt(half * half + m12 * m21)
    return tau + s, tau - s


def dark_residual(h: EffectiveHamiltonian):
    """
    Smallest decay rate |Im lambda| relative to the matrix scale, elementwise for grids

    """
    first, second = eigenvalues_of(h.m)
    return np.minimum(np.abs(first.imag), np.abs(second.imag)) / h.scale


def dark_modes(h: EffectiveHamiltonian, c0: InitialState, tol: float = DEFAULT_MODE_TOL) -> ModeReport:
    """
    Classify the long-time behaviour from the eigenvalues of the effective Hamiltonian

    :param h: single (2x2) effective Hamiltonian
    :param c0: initial amplitudes
    :param tol: threshold on |Im lambda| relative to the largest matrix entry
    :return: ModeReport with the long-time concurrence when exactly one mode is non-decaying

    """
    if h.is_grid:
        raise DynamicsException("Mode analysis works on a single Hamiltonian, not a grid")
    if not tol > 0:
        raise DynamicsException(f"Mode tolerance must be positive, got {tol}")

    first, second = eigenvalues_of(h.m)
    eigenvalues = (complex(first), complex(second))
    scale = float(h.scale)
    stable = [abs(value.imag) < tol * scale for value in eigenvalues]

    if all(stable):
        return ModeReport(eigenvalues, ModeClassification.PERSISTENT_OSCILLATION, None)
    if not any(stable):
        return ModeReport(eigenvalues, ModeClassification.DECAYS_TO_ZERO, 0.0)

    kept = stable.index(True)
    dark, bright = eigenvalues[kept], eigenvalues[1 - kept]
    # Spectral projector on the dark mode, normalised against the dual eigenvector
    projector = (h.m - bright * np.eye(2)) / (dark - bright)
    p_eg, p_ge = projector @ np.array([c0.c_eg0, c0.c_ge0])
    c_ss = float(2 * abs(p_eg) * abs(p_ge))

    logger.debug("Dark mode lambda=%s, projection (%s, %s)", dark, p_eg, p_ge)
    return ModeReport(eigenvalues, ModeClassification.STEADY_PLATEAU, c_ss,
                      float(np.sqrt(abs(p_eg) ** 2 + abs(p_ge) ** 2)))
