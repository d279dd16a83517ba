from experiments.sweeps import chirality_scan
from reports.commands import SimulationCommand, parse_chi_list_flag
from reports.serializers import ChiralityScanTable


DEFAULT_CHI_LIST = (0.0, 0.5, 1.0)


class Command(SimulationCommand):
    help = "Trajectories at one phase for several chiralities"

    option_flags = {'chis': "chi_list", 'time_axis': "time_axis"}

    def add_command_arguments(self, parser):
        parser.add_argument('--chis', help="Comma separated chiralities")
        parser.add_argument('--time-axis', choices=("gamma", "gamma_r"),
                            help="Unit of the time grid: 1/gamma (default) or 1/gamma_R")

    def handle(self, *args, **options):
        if options['chis']:
            options['chis'] = parse_chi_list_flag(options['chis'])
        spec = self.load_experiment(options)
        entries = chirality_scan(spec.layout, self.single_phase(spec), spec.option("chi_list", DEFAULT_CHI_LIST),
                                 spec.initial, spec.time_values(), spec.gamma_total,
                                 spec.option("time_axis", "gamma"))
        self.emit(ChiralityScanTable(entries), spec)
