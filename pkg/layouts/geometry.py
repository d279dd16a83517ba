import enum
import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple


logger = logging.getLogger(__name__)

POINTS_PER_ATOM = 3
NORM_TOLERANCE = 1e-12


class WaveguideModelException(Exception):
    pass


class AtomLabel(str, enum.Enum):
    A = "a"
    B = "b"


class Preset(str, enum.Enum):
    SEPARATED = "separated"
    FULLY_BRAIDED = "fully_braided"
    PARTIALLY_BRAIDED = "partially_braided"
    FULLY_NESTED = "fully_nested"
    PARTIALLY_NESTED = "partially_nested"
    CUSTOM = "custom"


# Canonical orderings on positions 0..5, read left to right along the waveguide
PRESET_ORDERINGS = {
    Preset.SEPARATED: "aaabbb",
    Preset.FULLY_BRAIDED: "ababab",
    Preset.PARTIALLY_BRAIDED: "aababb",
    Preset.FULLY_NESTED: "aabbba",
    Preset.PARTIALLY_NESTED: "aabbab",
}


@dataclass(frozen=True)
class CouplingPoint:
    position: int
    rate_right: Optional[float] = None
    rate_left: Optional[float] = None

    @property
    def has_rates(self) -> bool:
        return self.rate_right is not None and self.rate_left is not None


@dataclass(frozen=True)
class GiantAtom:
    label: AtomLabel
    points: Tuple[CouplingPoint, ...]

    @property
    def positions(self) -> Tuple[int, ...]:
        return tuple(point.position for point in self.points)


@dataclass(frozen=True)
class LayoutConfiguration:
    atom_a: GiantAtom
    atom_b: GiantAtom
    preset_tag: Preset = Preset.CUSTOM

    @classmethod
    def from_positions(cls, positions_a, positions_b, preset_tag=Preset.CUSTOM):
        atom_a = GiantAtom(AtomLabel.A, tuple(CouplingPoint(x) for x in positions_a))
        atom_b = GiantAtom(AtomLabel.B, tuple(CouplingPoint(x) for x in positions_b))
        return cls(atom_a, atom_b, preset_tag)

    @classmethod
    def from_ordering(cls, ordering: str, preset_tag=Preset.CUSTOM):
        """
        Build a layout from an a/b string such as "aababb", letter i sitting at position i

        """
        ordering = ordering.lower()
        if set(ordering) - {"a", "b"}:
            raise WaveguideModelException(f"Ordering {ordering!r} may only contain 'a' and 'b'")

        positions_a = [i for i, letter in enumerate(ordering) if letter == "a"]
        positions_b = [i for i, letter in enumerate(ordering) if letter == "b"]
        return cls.from_positions(positions_a, positions_b, preset_tag)

    @property
    def ordering(self) -> str:
        """
        a/b string of the coupling points sorted along the waveguide

        """
        labelled = [(x, "a") for x in self.atom_a.positions] + [(x, "b") for x in self.atom_b.positions]
        return "".join(letter for _, letter in sorted(labelled))

    def with_uniform_rates(self, rate_right: float, rate_left: float) -> "LayoutConfiguration":
        def fill(atom):
            points = tuple(CouplingPoint(p.position, rate_right, rate_left) for p in atom.points)
            return GiantAtom(atom.label, points)

        return LayoutConfiguration(fill(self.atom_a), fill(self.atom_b), self.preset_tag)


@dataclass(frozen=True)
class ChiralitySpec:
    gamma_total: float = 1.0
    chi: float = 0.0

    def rates(self) -> Tuple[float, float]:
        return rates_from_chirality(self)


@dataclass(frozen=True)
class InitialState:
    c_eg0: complex
    c_ge0: complex

    def __post_init__(self):
        norm = abs(self.c_eg0) ** 2 + abs(self.c_ge0) ** 2
        if not math.isfinite(norm) or abs(norm - 1) > NORM_TOLERANCE:
            raise WaveguideModelException(f"Initial state ({self.c_eg0}, {self.c_ge0}) is not normalised: "
                                          f"|c_eg|^2 + |c_ge|^2 = {norm}")
        object.__setattr__(self, "c_eg0", complex(self.c_eg0))
        object.__setattr__(self, "c_ge0", complex(self.c_ge0))

    @classmethod
    def from_label(cls, label: str) -> "InitialState":
        try:
            return INITIAL_STATES[label.upper()]
        except KeyError:
            raise WaveguideModelException(f"Unknown initial state {label!r}, expected EG or GE")

    @property
    def label(self) -> Optional[str]:
        for label, state in INITIAL_STATES.items():
            if state == self:
                return label
        return None

    @property
    def is_real(self) -> bool:
        return self.c_eg0.imag == 0 and self.c_ge0.imag == 0


INITIAL_STATES = {
    "EG": InitialState(1, 0),
    "GE": InitialState(0, 1),
}


def make_preset(tag) -> LayoutConfiguration:
    tag = Preset(tag)
    if tag is Preset.CUSTOM:
        raise WaveguideModelException("A custom layout has no canonical positions")

    return LayoutConfiguration.from_ordering(PRESET_ORDERINGS[tag], preset_tag=tag)


def validate_layout(cfg: LayoutConfiguration) -> List[str]:
    """
    List every violation of the layout invariants, empty when the layout is valid

    :param cfg: layout to check
    :return: list of human readable violations

    """
    report = []

    for atom in (cfg.atom_a, cfg.atom_b):
        positions = atom.positions
        if len(positions) != POINTS_PER_ATOM:
            report.append(f"atom {atom.label.value}: expected {POINTS_PER_ATOM} coupling points, "
                          f"got {len(positions)}")

        for position in positions:
            if not isinstance(position, int) or isinstance(position, bool) or position < 0:
                report.append(f"atom {atom.label.value}: position {position!r} is not a non-negative integer")

        if any(left >= right for left, right in zip(positions, positions[1:])):
            report.append(f"atom {atom.label.value}: positions {list(positions)} are not strictly increasing")

        for point in atom.points:
            for rate in (point.rate_right, point.rate_left):
                if rate is not None and not rate >= 0:
                    report.append(f"atom {atom.label.value}: negative or invalid rate {rate!r} "
                                  f"at position {point.position}")

    seen = set()
    for position in itertools.chain(cfg.atom_a.positions, cfg.atom_b.positions):
        if position in seen:
            report.append(f"duplicate position {position}")
        seen.add(position)

    return report


def ensure_valid(cfg: LayoutConfiguration) -> LayoutConfiguration:
    report = validate_layout(cfg)
    if report:
        raise WaveguideModelException(f"Invalid layout: {'; '.join(report)}")
    return cfg


def epsilon(x_a: int, x_b: int) -> int:
    """
    Sign of the propagation direction from a point of atom a to a point of atom b

    """
    if x_a < x_b:
        return 1
    if x_a > x_b:
        return -1
    return 0


def rates_from_chirality(spec: ChiralitySpec) -> Tuple[float, float]:
    gamma, chi = spec.gamma_total, spec.chi

    if not (math.isfinite(gamma) and gamma > 0):
        raise WaveguideModelException(f"gamma_total must be a positive rate, got {gamma}")
    if not 0 <= chi <= 1:
        raise WaveguideModelException(f"chi must lie in [0, 1], got {chi}")

    return gamma * (1 + chi) / 2, gamma * (1 - chi) / 2


def all_orderings() -> List[str]:
    """
    The 20 ways to interleave three a's and three b's, in lexicographic order

    """
    orderings = []
    for slots in itertools.combinations(range(2 * POINTS_PER_ATOM), POINTS_PER_ATOM):
        orderings.append("".join("a" if i in slots else "b" for i in range(2 * POINTS_PER_ATOM)))
    return sorted(orderings)


def classify_ordering(ordering: str) -> Preset:
    """
    Name the configuration family of an a/b ordering

    Separated: one atom entirely on one side. Fully braided: strictly alternating.
    Fully nested: one atom inside a single gap of the other. Partially nested: some
    gap of one atom holds two points of the other. Partially braided otherwise.

    """
    layout = LayoutConfiguration.from_ordering(ordering)
    a, b = layout.atom_a.positions, layout.atom_b.positions

    if max(a) < min(b) or max(b) < min(a):
        return Preset.SEPARATED
    if all(left != right for left, right in zip(ordering, ordering[1:])):
        return Preset.FULLY_BRAIDED

    gap_counts = []
    for outer, inner in ((a, b), (b, a)):
        for low, high in zip(outer, outer[1:]):
            gap_counts.append(sum(1 for x in inner if low < x < high))

    if POINTS_PER_ATOM in gap_counts:
        return Preset.FULLY_NESTED
    if any(count >= 2 for count in gap_counts):
        return Preset.PARTIALLY_NESTED
    return Preset.PARTIALLY_BRAIDED
