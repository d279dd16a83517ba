import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from layouts.geometry import LayoutConfiguration, epsilon, validate_layout


logger = logging.getLogger(__name__)

PSD_SLACK = 1e-12


class CoefficientException(Exception):
    pass


@dataclass(frozen=True)
class CoefficientSet:
    """
    Lamb shifts, individual and collective decays and exchange coupling of the two atoms.

    Fields are plain numbers for a single phase, or numpy arrays sharing the shape of
    ``phi`` when the coefficients were evaluated over a phase grid.

    """
    delta_omega_a: Any
    delta_omega_b: Any
    gamma_a: Any
    gamma_b: Any
    gamma_coll: Any
    g: Any
    phi: Optional[Any] = None

    @property
    def is_grid(self) -> bool:
        return np.ndim(self.gamma_a) > 0

    def at(self, index) -> "CoefficientSet":
        """
        Scalar coefficient set for one entry of a grid evaluation

        """
        def pick(value, kind):
            return kind(np.asarray(value)[index])

        return CoefficientSet(pick(self.delta_omega_a, float), pick(self.delta_omega_b, float),
                              pick(self.gamma_a, float), pick(self.gamma_b, float),
                              pick(self.gamma_coll, complex), pick(self.g, complex),
                              None if self.phi is None else pick(self.phi, float))


def phase_distance(p: int, q: int, phi):
    return abs(p - q) * phi


def _point_rates(cfg: LayoutConfiguration, gamma_right: float, gamma_left: float):
    rates = []
    for atom in (cfg.atom_a, cfg.atom_b):
        rates.append([(point.position,
                       point.rate_right if point.has_rates else gamma_right,
                       point.rate_left if point.has_rates else gamma_left)
                      for point in atom.points])
    return rates


def _check_inputs(cfg: LayoutConfiguration, phi):
    report = validate_layout(cfg)
    if report:
        raise CoefficientException(f"Invalid layout: {'; '.join(report)}")

    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise CoefficientException("Phase shift must be finite")
    return phi


def _pack(phi, delta_a, delta_b, gamma_a, gamma_b, gamma_coll, g) -> CoefficientSet:
    if phi.ndim == 0:
        return CoefficientSet(float(delta_a), float(delta_b), float(gamma_a), float(gamma_b),
                              complex(gamma_coll), complex(g), float(phi))
    return CoefficientSet(delta_a, delta_b, gamma_a, gamma_b, gamma_coll, g, phi)


def coefficients(cfg: LayoutConfiguration, phi, gamma_right: float, gamma_left: float) -> CoefficientSet:
    """
    Chiral coefficients by full double summation over the coupling points

    :param cfg: layout of the two giant atoms
    :param phi: phase per lattice unit, scalar or array
    :param gamma_right: emission rate into right-moving modes, used for points without own rates
    :param gamma_left: emission rate into left-moving modes, used for points without own rates
    :return: CoefficientSet, arrays shaped like phi when phi is an array

    """
    phi = _check_inputs(cfg, phi)
    if gamma_right < 0 or gamma_left < 0 or gamma_right + gamma_left <= 0:
        raise CoefficientException(f"Rates must be non-negative and not both zero, "
                                   f"got gamma_R={gamma_right}, gamma_L={gamma_left}")

    rates_a, rates_b = _point_rates(cfg, gamma_right, gamma_left)

    def self_terms(rates):
        delta = np.zeros_like(phi)
        gamma = np.zeros_like(phi)
        for (x_n, right_n, left_n), (x_m, right_m, left_m) in itertools.product(rates, rates):
            weight = math.sqrt(right_n * right_m) + math.sqrt(left_n * left_m)
            theta = phase_distance(x_n, x_m, phi)
            delta = delta + weight / 2 * np.sin(theta)
            gamma = gamma + weight * np.cos(theta)
        return delta, gamma

    delta_a, gamma_a = self_terms(rates_a)
    delta_b, gamma_b = self_terms(rates_b)

    gamma_coll = np.zeros_like(phi, dtype=complex)
    g = np.zeros_like(phi, dtype=complex)
    for (x_a, right_a, left_a), (x_b, right_b, left_b) in itertools.product(rates_a, rates_b):
        sign = epsilon(x_a, x_b)
        theta = phase_distance(x_a, x_b, phi)
        forward = math.sqrt(right_a * right_b) * np.exp(1j * sign * theta)
        backward = math.sqrt(left_a * left_b) * np.exp(-1j * sign * theta)
        gamma_coll = gamma_coll + forward + backward
        g = g + sign / 2j * (forward - backward)

    return _pack(phi, delta_a, delta_b, gamma_a, gamma_b, gamma_coll, g)


def coefficients_nonchiral(cfg: LayoutConfiguration, phi, gamma: float) -> CoefficientSet:
    """
    Bidirectional coefficients from the plain cosine/sine sums, without direction signs

    """
    phi = _check_inputs(cfg, phi)
    if not gamma > 0:
        raise CoefficientException(f"gamma must be positive, got {gamma}")

    def total_rates(atom):
        return [(point.position,
                 point.rate_right + point.rate_left if point.has_rates else gamma)
                for point in atom.points]

    rates_a, rates_b = total_rates(cfg.atom_a), total_rates(cfg.atom_b)

    def self_terms(rates):
        delta = np.zeros_like(phi)
        decay = np.zeros_like(phi)
        for (x_n, rate_n), (x_m, rate_m) in itertools.product(rates, rates):
            weight = math.sqrt(rate_n * rate_m)
            theta = phase_distance(x_n, x_m, phi)
            delta = delta + weight / 2 * np.sin(theta)
            decay = decay + weight * np.cos(theta)
        return delta, decay

    delta_a, gamma_a = self_terms(rates_a)
    delta_b, gamma_b = self_terms(rates_b)

    gamma_coll = np.zeros_like(phi)
    g = np.zeros_like(phi)
    for (x_a, rate_a), (x_b, rate_b) in itertools.product(rates_a, rates_b):
        weight = math.sqrt(rate_a * rate_b)
        theta = phase_distance(x_a, x_b, phi)
        gamma_coll = gamma_coll + weight * np.cos(theta)
        g = g + weight / 2 * np.sin(theta)

    return _pack(phi, delta_a, delta_b, gamma_a, gamma_b, gamma_coll.astype(complex), g.astype(complex))


def check_dissipator_psd(c: CoefficientSet) -> bool:
    """
    True when the 2x2 collective decay matrix is positive semidefinite (elementwise for grids)

    """
    gamma_a = np.asarray(c.gamma_a, dtype=float)
    gamma_b = np.asarray(c.gamma_b, dtype=float)
    coll = np.abs(np.asarray(c.gamma_coll)) ** 2

    # Gamma_j are sums of squares, rounding can leave them a hair below zero
    total = np.abs(gamma_a) + np.abs(gamma_b)
    scale = np.maximum(1.0, total)
    floor = -PSD_SLACK * scale
    # Rounding in |Gamma_coll|^2 - Gamma_a Gamma_b grows with Gamma_a + Gamma_b and vanishes with it
    slack = PSD_SLACK * scale * total + (PSD_SLACK * scale) ** 2
    ok = (gamma_a >= floor) & (gamma_b >= floor) \
        & (coll <= gamma_a * gamma_b * (1 + PSD_SLACK) + slack)
    return bool(np.all(ok))
