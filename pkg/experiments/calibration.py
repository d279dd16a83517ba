import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from django.conf import settings

from experiments.search import find_max
from experiments.sweeps import ExperimentException
from experiments.workers import map_ordered
from layouts.geometry import (ChiralitySpec, INITIAL_STATES, LayoutConfiguration, PRESET_ORDERINGS, Preset,
                              all_orderings, classify_ordering)


logger = logging.getLogger(__name__)

TARGET_LABELS = ("eg_nonchiral", "ge_nonchiral", "eg_chiral", "ge_chiral")

# Maximum concurrence bands (low, high) per configuration, in TARGET_LABELS order
REFERENCE_MAXIMA = {
    Preset.SEPARATED: ((0.5, 0.5), (0.5, 0.5), (0.736, 0.736), (0.0, 0.0)),
    Preset.FULLY_BRAIDED: ((1.0, 1.0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0)),
    Preset.PARTIALLY_BRAIDED: ((0.77, 0.77), (0.77, 0.77), (0.86, 0.87), (0.89, 0.89)),
    Preset.FULLY_NESTED: ((0.87, 0.87), (0.96, 0.96), (0.90, 0.90), (0.98, 0.98)),
    Preset.PARTIALLY_NESTED: ((0.83, 0.83), (0.78, 0.78), (0.94, 0.94), (0.93, 0.93)),
}

# Nonchiral |e_a g_b> peaks over time at a fixed phase: (phi, expected maximum)
PEAK_CONSTRAINTS = {
    Preset.PARTIALLY_BRAIDED: ((11 * math.pi / 25, 0.77),),
    Preset.FULLY_NESTED: ((math.pi / 4, 0.67),),
    Preset.PARTIALLY_NESTED: ((math.pi / 4, 0.83), (7 * math.pi / 4, 0.83)),
}

PEAK_BAND = 0.02
UNRESOLVED_SCORE = 0.02
SCORE_QUANTUM = 1e-9


@dataclass(frozen=True)
class CalibrationTask:
    ordering: str
    family: Preset
    gamma_total: float
    horizon: float
    phi_points: int
    t_points: int


@dataclass(frozen=True)
class OrderingEvaluation:
    ordering: str
    family: Preset
    maxima: Tuple[float, float, float, float]
    peaks: Tuple[Tuple[float, float], ...] = ()


@dataclass(frozen=True)
class ConfigurationCalibration:
    configuration: Preset
    ordering: str
    default_ordering: str
    score: float
    residuals: Dict[str, float]
    peak_residuals: Tuple[Tuple[float, float], ...]
    resolved: bool
    maxima: Tuple[float, float, float, float]

    @property
    def confirms_default(self) -> bool:
        return self.ordering == self.default_ordering


@dataclass(frozen=True)
class CalibrationResult:
    configurations: List[ConfigurationCalibration]
    evaluations: List[OrderingEvaluation] = field(default_factory=list)

    def for_configuration(self, preset) -> ConfigurationCalibration:
        preset = Preset(preset)
        for entry in self.configurations:
            if entry.configuration is preset:
                return entry
        raise KeyError(preset)


def band_deviation(value: float, band: Tuple[float, float]) -> float:
    low, high = band
    return max(low - value, value - high, 0.0)


def evaluate_ordering(task: CalibrationTask) -> OrderingEvaluation:
    """
    Reference maxima and peak checks of one ordering; module level so process pools can pickle it

    """
    layout = LayoutConfiguration.from_ordering(task.ordering)
    # Real initial states make C symmetric under phi -> 2 pi - phi, half the range suffices
    search = dict(phi_range=(0.0, math.pi), t_horizon=task.horizon,
                  phi_points=task.phi_points, t_points=task.t_points)

    maxima = []
    for chi in (0.0, 1.0):
        chirality = ChiralitySpec(task.gamma_total, chi)
        for label in ("EG", "GE"):
            maxima.append(find_max(layout, chirality, INITIAL_STATES[label], **search).c_max)
    maxima = tuple(maxima)

    peaks = []
    nonchiral = ChiralitySpec(task.gamma_total, 0.0)
    for phi, _ in PEAK_CONSTRAINTS.get(task.family, ()):
        result = find_max(layout, nonchiral, INITIAL_STATES["EG"], phi_range=(phi, phi),
                          t_horizon=task.horizon, t_points=task.t_points)
        peaks.append((phi, result.c_max))

    logger.info("Ordering %s (%s): maxima %s", task.ordering, task.family.value,
                ", ".join(f"{value:.3f}" for value in maxima))
    return OrderingEvaluation(task.ordering, task.family, maxima, tuple(peaks))


def _score(evaluation: OrderingEvaluation, configuration: Preset):
    residuals = {label: band_deviation(value, band)
                 for label, value, band in zip(TARGET_LABELS, evaluation.maxima, REFERENCE_MAXIMA[configuration])}
    expected = dict(PEAK_CONSTRAINTS.get(configuration, ()))
    peak_residuals = tuple((phi, abs(value - expected[phi])) for phi, value in evaluation.peaks)
    peaks_ok = all(residual <= PEAK_BAND for _, residual in peak_residuals)
    return max(residuals.values()), residuals, peak_residuals, peaks_ok


def calibrate_presets(configurations: Optional[Sequence] = None, gamma_total: float = 1.0,
                      horizon: Optional[float] = None, phi_points: Optional[int] = None,
                      t_points: Optional[int] = None, workers: Optional[int] = None) -> CalibrationResult:
    """
    Match every interleaving of aaabbb against the reference maxima and peaks

    Each named configuration picks, among the orderings of its own family, the one that
    passes its peak checks with the smallest worst-case deviation from the reference maxima. The
    presets themselves are left untouched; the result says whether each default is confirmed.

    :param configurations: subset of presets to calibrate, all five by default
    :return: CalibrationResult with one entry per configuration and every ordering evaluated

    """
    defaults = settings.SIMULATION
    horizon = defaults['FIND_MAX_HORIZON'] if horizon is None else horizon
    phi_points = defaults['FIND_MAX_PHI_POINTS'] if phi_points is None else phi_points
    t_points = defaults['FIND_MAX_T_POINTS'] if t_points is None else t_points

    wanted = [Preset(name) for name in (configurations or REFERENCE_MAXIMA.keys())]
    if Preset.CUSTOM in wanted:
        raise ExperimentException("Only named configurations can be calibrated")

    tasks = [CalibrationTask(ordering, classify_ordering(ordering), gamma_total, horizon, phi_points, t_points)
             for ordering in all_orderings()]
    tasks = [task for task in tasks if task.family in wanted]
    logger.info("Calibrating %d orderings for %s", len(tasks), ", ".join(p.value for p in wanted))

    evaluations = map_ordered(evaluate_ordering, tasks, workers)

    entries = []
    for configuration in wanted:
        scored = []
        for evaluation in evaluations:
            if evaluation.family is not configuration:
                continue
            score, residuals, peak_residuals, peaks_ok = _score(evaluation, configuration)
            scored.append((not peaks_ok, score, evaluation.ordering, evaluation, residuals, peak_residuals))

        default = PRESET_ORDERINGS[configuration]

        def rank(row):
            # Scores equal up to rounding are ties, settled by the default then by name
            failed, score, ordering = row[:3]
            return failed, round(score / SCORE_QUANTUM), ordering != default, ordering

        failed_peaks, score, ordering, evaluation, residuals, peak_residuals = min(scored, key=rank)
        resolved = score <= UNRESOLVED_SCORE and not failed_peaks
        entry = ConfigurationCalibration(configuration, ordering, default, score,
                                         residuals, peak_residuals, resolved, evaluation.maxima)
        if not resolved:
            logger.warning("%s unresolved: best ordering %s scores %.4f", configuration.value, ordering, score)
        elif not entry.confirms_default:
            logger.warning("%s: ordering %s matches better than the default %s",
                           configuration.value, ordering, entry.default_ordering)
        entries.append(entry)

    return CalibrationResult(entries, list(evaluations))
