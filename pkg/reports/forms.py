import math
import numbers

from django import forms
from django.core.exceptions import ValidationError

from layouts.geometry import (INITIAL_STATES, InitialState, LayoutConfiguration, Preset,
                              WaveguideModelException, make_preset, validate_layout)


def _is_number(value) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool) and math.isfinite(value)


class LayoutField(forms.Field):
    """
    Preset name ("fully_braided") or explicit positions {"a": [0, 1, 3], "b": [2, 4, 5]}

    """
    def to_python(self, value):
        if value in self.empty_values:
            return None

        if isinstance(value, str):
            try:
                preset = Preset(value.lower())
            except ValueError:
                raise ValidationError(f"Unknown preset {value!r}")
            if preset is Preset.CUSTOM:
                raise ValidationError("A custom layout needs explicit positions")
            return make_preset(preset)

        if isinstance(value, dict):
            if set(value) != {"a", "b"}:
                raise ValidationError("Explicit layouts need exactly the keys 'a' and 'b'")
            for label in ("a", "b"):
                positions = value[label]
                if not isinstance(positions, list) \
                        or not all(isinstance(x, int) and not isinstance(x, bool) for x in positions):
                    raise ValidationError(f"Positions of atom {label} must be a list of integers")
            return LayoutConfiguration.from_positions(value["a"], value["b"])

        raise ValidationError("Layout must be a preset name or an object with positions")

    def validate(self, value):
        super().validate(value)
        if value is not None:
            report = validate_layout(value)
            if report:
                raise ValidationError(report)


class GridField(forms.Field):
    """
    {"start": x, "stop": y, "count": n} or [x, y, n], cleaned to a (start, stop, count) tuple

    """
    def to_python(self, value):
        if value in self.empty_values:
            return None
        if isinstance(value, dict):
            if set(value) != {"start", "stop", "count"}:
                raise ValidationError("A grid needs exactly 'start', 'stop' and 'count'")
            value = [value["start"], value["stop"], value["count"]]
        if not isinstance(value, (list, tuple)) or len(value) != 3:
            raise ValidationError("A grid is {start, stop, count}")

        start, stop, count = value
        if not (_is_number(start) and _is_number(stop)):
            raise ValidationError("Grid bounds must be numbers")
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ValidationError("Grid count must be a positive integer")
        if stop < start:
            raise ValidationError("Grid stop must not be below start")
        return float(start), float(stop), count


class PhaseField(GridField):
    """
    Single phase or a phase grid

    """
    def to_python(self, value):
        if isinstance(value, numbers.Real) and not isinstance(value, bool):
            if not math.isfinite(value):
                raise ValidationError(f"Phase must be a finite number, got {value}")
            return float(value)
        return super().to_python(value)


class InitialStateField(forms.Field):
    """
    "EG", "GE" or explicit amplitudes [re_eg, im_eg, re_ge, im_ge]

    """
    def to_python(self, value):
        if value in self.empty_values:
            return None
        if isinstance(value, str):
            if value.upper() not in INITIAL_STATES:
                raise ValidationError(f"Unknown initial state {value!r}, expected EG or GE")
            return INITIAL_STATES[value.upper()]
        if isinstance(value, (list, tuple)) and len(value) == 4 and all(_is_number(x) for x in value):
            try:
                return InitialState(complex(value[0], value[1]), complex(value[2], value[3]))
            except WaveguideModelException as e:
                raise ValidationError(str(e))
        raise ValidationError("Initial state must be EG, GE or four numbers re,im,re,im")


class ChiListField(forms.Field):
    def to_python(self, value):
        if value in self.empty_values:
            return None
        if not isinstance(value, (list, tuple)) or not all(_is_number(x) for x in value):
            raise ValidationError("chi_list must be a list of numbers")
        if not all(0 <= x <= 1 for x in value):
            raise ValidationError("Every chirality must lie in [0, 1]")
        return tuple(float(x) for x in value)


class ExperimentForm(forms.Form):
    layout = LayoutField(required=True)
    gamma_total = forms.FloatField(required=False)
    chi = forms.FloatField(required=False, min_value=0, max_value=1)
    phi = PhaseField(required=False)
    time = GridField(required=False)
    initial = InitialStateField(required=False)

    # Command-specific options
    window = forms.FloatField(required=False)
    tol = forms.FloatField(required=False)
    horizon = forms.FloatField(required=False)
    dt = forms.FloatField(required=False)
    phi_points = forms.IntegerField(required=False, min_value=1)
    t_points = forms.IntegerField(required=False, min_value=2)
    chi_list = ChiListField(required=False)
    time_axis = forms.ChoiceField(required=False, choices=[("gamma", "gamma"), ("gamma_r", "gamma_r")])
    out = forms.CharField(required=False)
    format = forms.ChoiceField(required=False, choices=[("csv", "csv"), ("ndjson", "ndjson"), ("svg", "svg")])

    POSITIVE_FIELDS = ("gamma_total", "window", "tol", "horizon", "dt")

    def clean(self):
        cleaned_data = super().clean()
        for name in self.POSITIVE_FIELDS:
            value = cleaned_data.get(name)
            if value is not None and not value > 0:
                self.add_error(name, f"{name} must be positive")

        time = cleaned_data.get("time")
        if time is not None and time[0] < 0:
            self.add_error("time", "Time grid must start at t >= 0")
        if time is not None and time[2] > 1 and time[1] == time[0]:
            self.add_error("time", "Time grid with several points needs stop > start")
        return cleaned_data
