import logging
from typing import Any, Dict, Optional

from django.core.management.base import BaseCommand, CommandError

from coefficients.calculator import CoefficientException
from dynamics.hamiltonian import DynamicsException, UnphysicalDissipatorException
from experiments.sweeps import ExperimentException
from layouts.geometry import WaveguideModelException
from reports.config import (ConfigParseException, ConfigValidationException, ExperimentSpec, GridSpec,
                            ReportException, build_experiment, load_document)
from reports.serializers import FORMATS, serialize_results


logger = logging.getLogger(__name__)

EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3

VALIDATION_ERRORS = (ConfigParseException, ConfigValidationException, ReportException, WaveguideModelException,
                     CoefficientException, DynamicsException, ExperimentException)


def parse_grid_flag(name: str, text: str) -> Dict[str, Any]:
    """
    "start:stop:count" into a grid document

    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigValidationException(name, f"Expected start:stop:count, got {text!r}")
    try:
        return {"start": float(parts[0]), "stop": float(parts[1]), "count": int(parts[2])}
    except ValueError:
        raise ConfigValidationException(name, f"Expected start:stop:count, got {text!r}")


def parse_phi_flag(text: str):
    if ":" in text:
        return parse_grid_flag("phi", text)
    try:
        return float(text)
    except ValueError:
        raise ConfigValidationException("phi", f"Expected a number or start:stop:count, got {text!r}")


def parse_initial_flag(text: str):
    if "," not in text:
        return text.upper()
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise ConfigValidationException("initial", f"Expected eg, ge or re,im,re,im, got {text!r}")


def parse_chi_list_flag(text: str):
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise ConfigValidationException("chi_list", f"Expected comma separated numbers, got {text!r}")


class SimulationCommand(BaseCommand):
    """
    Base of every simulation command: shared flags, experiment loading, output and exit codes.

    Subclasses add their own flags in ``add_command_arguments`` and list in ``option_flags``
    the flags that map onto optional fields of the experiment document.

    """
    requires_system_checks = []

    # CLI dest -> experiment document field
    option_flags: Dict[str, str] = {}

    def add_arguments(self, parser):
        self.add_experiment_arguments(parser)
        self.add_output_arguments(parser)
        self.add_command_arguments(parser)

    def add_experiment_arguments(self, parser):
        parser.add_argument('--config', help="JSON experiment document")
        parser.add_argument('--preset', help="Named layout, overrides the document's layout")
        parser.add_argument('--phi', help="Phase per lattice unit, real or start:stop:count")
        parser.add_argument('--gamma', type=float, help="Total decay rate per coupling point")
        parser.add_argument('--chi', type=float, help="Chirality in [0, 1]")
        parser.add_argument('--t', help="Time grid start:stop:count, in units of 1/gamma")
        parser.add_argument('--initial', help="eg, ge or re,im,re,im")

    def add_output_arguments(self, parser):
        parser.add_argument('--out', help="Output file, standard output when omitted")
        parser.add_argument('--format', choices=FORMATS, help="Output format, csv by default")

    def add_command_arguments(self, parser):
        pass

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except UnphysicalDissipatorException as e:
            raise CommandError(f"Numerical failure: {e}", returncode=EXIT_NUMERICAL)
        except OSError as e:
            raise CommandError(f"I/O error: {e}", returncode=EXIT_IO)
        except VALIDATION_ERRORS as e:
            raise CommandError(str(e), returncode=EXIT_VALIDATION)

    def load_experiment(self, options) -> ExperimentSpec:
        """
        Experiment document from --config, overridden by the command-line flags

        """
        document = {}
        if options.get('config'):
            with open(options['config'], encoding="utf-8") as f:
                try:
                    text = f.read()
                except UnicodeDecodeError as e:
                    raise ConfigValidationException("document", f"Experiment file is not valid UTF-8: {e.reason} "
                                                                f"at byte {e.start}")
                document = load_document(text)
            if not isinstance(document, dict):
                raise ConfigValidationException("document", "An experiment document must be a JSON object")

        overrides = {
            "layout": options.get('preset'),
            "phi": parse_phi_flag(options['phi']) if options.get('phi') else None,
            "gamma_total": options.get('gamma'),
            "chi": options.get('chi'),
            "time": parse_grid_flag("time", options['t']) if options.get('t') else None,
            "initial": parse_initial_flag(options['initial']) if options.get('initial') else None,
            "out": options.get('out'),
            "format": options.get('format'),
        }
        for dest, field_name in self.option_flags.items():
            overrides[field_name] = options.get(dest)
        document.update({name: value for name, value in overrides.items() if value is not None})

        return build_experiment(document)

    def single_phase(self, spec: ExperimentSpec) -> float:
        if isinstance(spec.phi, GridSpec):
            if spec.phi.count != 1:
                raise ConfigValidationException("phi", "This command needs a single phase, pass --phi <real>")
            return spec.phi.start
        return spec.phi

    def emit(self, result, spec: Optional[ExperimentSpec] = None, out: Optional[str] = None,
             fmt: Optional[str] = None):
        """
        Serialize the result to the output file, or to standard output

        """
        if spec is not None:
            out = out or spec.option("out")
            fmt = fmt or spec.option("format")
        data = serialize_results(result, fmt or "csv")

        if out:
            with open(out, "wb") as f:
                f.write(data)
            self.stdout.write(self.style.SUCCESS(f"Wrote {len(data)} bytes to {out}"))
        else:
            self.stdout.write(data.decode("utf-8"), ending="")
