import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np
from django.conf import settings

from layouts.geometry import ChiralitySpec, INITIAL_STATES, InitialState, LayoutConfiguration, Preset
from reports.forms import ExperimentForm


logger = logging.getLogger(__name__)

CORE_FIELDS = ("layout", "gamma_total", "chi", "phi", "time", "initial")


class ReportException(Exception):
    pass


class ConfigParseException(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConfigValidationException(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def to_document(self) -> Dict[str, Any]:
        return {"start": self.start, "stop": self.stop, "count": self.count}


@dataclass(frozen=True)
class ExperimentSpec:
    layout: LayoutConfiguration
    gamma_total: float
    chi: float
    phi: Union[float, GridSpec]
    time: GridSpec
    initial: InitialState
    options: Dict[str, Any] = field(default_factory=dict)

    @property
    def chirality(self) -> ChiralitySpec:
        return ChiralitySpec(self.gamma_total, self.chi)

    def phi_values(self) -> np.ndarray:
        if isinstance(self.phi, GridSpec):
            return self.phi.values()
        return np.array([self.phi])

    def time_values(self) -> np.ndarray:
        return self.time.values()

    def option(self, name: str, default=None):
        return self.options.get(name, default)


def parse_experiment_config(text: str) -> ExperimentSpec:
    """
    Read a JSON experiment document and validate it

    :raise ConfigParseException: malformed JSON, with line and column
    :raise ConfigValidationException: well-formed document with an invalid field

    """
    return build_experiment(load_document(text))


def load_document(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseException(e.msg, e.lineno, e.colno)


def build_experiment(document) -> ExperimentSpec:
    """
    Validate an already decoded document and apply the defaults from settings.SIMULATION

    """
    if not isinstance(document, dict):
        raise ConfigValidationException("document", "An experiment document must be a JSON object")

    form = ExperimentForm(data=document)
    unknown = sorted(set(document) - set(form.fields))
    if unknown:
        raise ConfigValidationException(unknown[0], "Unknown field")

    if not form.is_valid():
        # Report fields in declaration order so the message is stable
        for name in form.fields:
            if name in form.errors:
                raise ConfigValidationException(name, " ".join(form.errors[name]))
        name, messages = next(iter(form.errors.items()))
        raise ConfigValidationException(name, " ".join(messages))

    data = form.cleaned_data
    defaults = settings.SIMULATION

    def default(name, fallback):
        return fallback if data.get(name) is None else data[name]

    def grid(name, fallback):
        value = default(name, fallback)
        return GridSpec(*value) if isinstance(value, tuple) else value

    spec = ExperimentSpec(
        layout=data["layout"],
        gamma_total=default("gamma_total", float(defaults['GAMMA_TOTAL'])),
        chi=default("chi", float(defaults['CHI'])),
        phi=grid("phi", _grid_defaults(defaults['PHI_GRID'])),
        time=grid("time", _grid_defaults(defaults['TIME_GRID'])),
        initial=default("initial", INITIAL_STATES[defaults['INITIAL']]),
        options={name: value for name, value in data.items()
                 if name not in CORE_FIELDS and value not in (None, "")},
    )
    logger.debug("Experiment on %s, chi=%s, gamma=%s", spec.layout.ordering, spec.chi, spec.gamma_total)
    return spec


def _grid_defaults(grid):
    start, stop, count = grid
    return float(start), float(stop), int(count)


def _layout_document(layout: LayoutConfiguration):
    if layout.preset_tag is not Preset.CUSTOM:
        return layout.preset_tag.value
    return {"a": list(layout.atom_a.positions), "b": list(layout.atom_b.positions)}


def _initial_document(initial: InitialState):
    label: Optional[str] = initial.label
    if label is not None:
        return label
    return [initial.c_eg0.real, initial.c_eg0.imag, initial.c_ge0.real, initial.c_ge0.imag]


def dump_experiment_config(spec: ExperimentSpec) -> str:
    """
    JSON document that parse_experiment_config reads back into an equal ExperimentSpec

    """
    document = {
        "layout": _layout_document(spec.layout),
        "gamma_total": spec.gamma_total,
        "chi": spec.chi,
        "phi": spec.phi.to_document() if isinstance(spec.phi, GridSpec) else spec.phi,
        "time": spec.time.to_document(),
        "initial": _initial_document(spec.initial),
    }
    for name, value in spec.options.items():
        document[name] = list(value) if isinstance(value, tuple) else value
    return json.dumps(document, sort_keys=True, indent=2)
