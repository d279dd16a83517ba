from experiments.calibration import calibrate_presets
from layouts.geometry import Preset
from reports.commands import SimulationCommand
from reports.config import ConfigValidationException


def parse_configurations(text: str):
    names = [name.strip() for name in text.split(",") if name.strip()]
    try:
        return [Preset(name) for name in names]
    except ValueError as e:
        raise ConfigValidationException("configurations", str(e))


class Command(SimulationCommand):
    help = "Match every ordering of the coupling points against the reference maxima"

    def add_arguments(self, parser):
        parser.add_argument('--configurations', help="Comma separated presets, all five by default")
        parser.add_argument('--gamma', type=float, default=1.0, help="Total decay rate per coupling point")
        parser.add_argument('--horizon', type=float, help="Latest time searched")
        parser.add_argument('--phi-points', type=int, help="Coarse phase samples on [0, pi]")
        parser.add_argument('--t-points', type=int, help="Coarse time samples")
        parser.add_argument('--workers', type=int, help="Worker processes")
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        if not options['gamma'] > 0:
            raise ConfigValidationException("gamma_total", "gamma_total must be positive")
        configurations = parse_configurations(options['configurations']) if options['configurations'] else None

        result = calibrate_presets(configurations, options['gamma'], options['horizon'],
                                   options['phi_points'], options['t_points'], options['workers'])
        for entry in result.configurations:
            status = "confirmed" if entry.confirms_default else f"differs from {entry.default_ordering}"
            if not entry.resolved:
                status += ", unresolved"
            self.stderr.write(f"{entry.configuration.value}: {entry.ordering} ({status})")

        self.emit(result, out=options['out'], fmt=options['format'])
