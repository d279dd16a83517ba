from django.conf import settings

from experiments.steady import detect_steady
from experiments.sweeps import single_trajectory
from reports.commands import SimulationCommand


class Command(SimulationCommand):
    help = "Amplitudes and concurrence over time at one phase"

    option_flags = {'dt': "dt", 'window': "window", 'tol': "tol"}

    def add_command_arguments(self, parser):
        parser.add_argument('--dt', type=float, help="Integrate with RK4 at this step instead of the exact propagator")
        parser.add_argument('--numeric', action='store_true',
                            help="Integrate with RK4 at the default step when --dt is not given")
        parser.add_argument('--steady', action='store_true', help="Report the steady state instead of the trajectory")
        parser.add_argument('--window', type=float, help="Plateau window for --steady")
        parser.add_argument('--tol', type=float, help="Plateau tolerance for --steady")

    def handle(self, *args, **options):
        spec = self.load_experiment(options)
        dt = spec.option("dt")
        if dt is None and options['numeric']:
            dt = settings.SIMULATION['RK4_DT']
        traj = single_trajectory(spec.layout, spec.chirality, spec.initial, self.single_phase(spec),
                                 spec.time_values(), dt)

        if options['steady']:
            self.emit(detect_steady(traj, spec.option("window"), spec.option("tol")), spec)
        else:
            self.emit(traj, spec)
