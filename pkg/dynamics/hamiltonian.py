import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from coefficients.calculator import CoefficientSet, check_dissipator_psd, coefficients
from layouts.geometry import ChiralitySpec, LayoutConfiguration, rates_from_chirality


logger = logging.getLogger(__name__)


class DynamicsException(Exception):
    pass


class UnphysicalDissipatorException(DynamicsException):
    pass


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    """
    Non-Hermitian generator in the ordered basis (|e_a g_b>, |g_a e_b>), i dc/dt = m c.

    ``m`` has shape (2, 2), or (..., 2, 2) when built from a coefficient grid.

    """
    m: np.ndarray
    coefficients: Optional[CoefficientSet] = None

    @property
    def entries(self):
        return self.m[..., 0, 0], self.m[..., 0, 1], self.m[..., 1, 0], self.m[..., 1, 1]

    @property
    def scale(self):
        """
        Largest entry modulus, the reference for relative tolerances (1 for the zero matrix)

        """
        scale = np.max(np.abs(self.m), axis=(-2, -1))
        return np.where(scale > 0, scale, 1.0)

    @property
    def is_grid(self) -> bool:
        return self.m.ndim > 2

    def decay_matrix(self) -> np.ndarray:
        return 1j * (self.m - np.conj(np.swapaxes(self.m, -1, -2)))


def build_heff(c: CoefficientSet) -> EffectiveHamiltonian:
    if not check_dissipator_psd(c):
        raise UnphysicalDissipatorException(f"Collective decay matrix is not positive semidefinite: "
                                            f"Gamma_a={c.gamma_a}, Gamma_b={c.gamma_b}, "
                                            f"Gamma_coll={c.gamma_coll}")

    gamma_coll = np.asarray(c.gamma_coll, dtype=complex)
    g = np.asarray(c.g, dtype=complex)
    m = np.empty(np.shape(gamma_coll) + (2, 2), dtype=complex)

    m[..., 0, 0] = np.asarray(c.delta_omega_a) - 0.5j * np.asarray(c.gamma_a)
    m[..., 1, 1] = np.asarray(c.delta_omega_b) - 0.5j * np.asarray(c.gamma_b)
    # g sigma_a^- sigma_b^+ carries the excitation from |e_a g_b> to |g_a e_b>
    m[..., 1, 0] = g - 0.5j * gamma_coll
    m[..., 0, 1] = np.conj(g) - 0.5j * np.conj(gamma_coll)

    return EffectiveHamiltonian(m, c)


def hamiltonian_for(cfg: LayoutConfiguration, phi, chirality: ChiralitySpec) -> EffectiveHamiltonian:
    """
    Coefficients then effective Hamiltonian for one phase or a phase grid

    """
    gamma_right, gamma_left = rates_from_chirality(chirality)
    return build_heff(coefficients(cfg, phi, gamma_right, gamma_left))
