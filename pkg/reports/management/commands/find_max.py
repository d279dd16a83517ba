from experiments.search import find_max
from reports.commands import SimulationCommand
from reports.config import GridSpec


class Command(SimulationCommand):
    help = "Maximum concurrence over the phase range and [0, horizon]"

    option_flags = {'horizon': "horizon", 'phi_points': "phi_points", 't_points': "t_points"}

    def add_command_arguments(self, parser):
        parser.add_argument('--horizon', type=float, help="Latest time searched, the time grid's end by default")
        parser.add_argument('--phi-points', type=int, help="Coarse phase samples")
        parser.add_argument('--t-points', type=int, help="Coarse time samples")

    def handle(self, *args, **options):
        spec = self.load_experiment(options)
        if isinstance(spec.phi, GridSpec):
            phi_range = (spec.phi.start, spec.phi.stop)
            phi_points = spec.option("phi_points", spec.phi.count)
        else:
            phi_range = (spec.phi, spec.phi)
            phi_points = 1

        result = find_max(spec.layout, spec.chirality, spec.initial, phi_range=phi_range,
                          t_horizon=spec.option("horizon", spec.time.stop), phi_points=phi_points,
                          t_points=spec.option("t_points"))
        self.emit(result, spec)
