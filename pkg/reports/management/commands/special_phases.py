from experiments.steady import find_special_phases
from reports.commands import SimulationCommand
from reports.serializers import SpecialPhaseTable


class Command(SimulationCommand):
    help = "Phases where the atoms decouple, interact without decay, or keep a dark mode"

    def handle(self, *args, **options):
        spec = self.load_experiment(options)
        phases = find_special_phases(spec.layout, spec.chirality, spec.initial)
        self.emit(SpecialPhaseTable(phases), spec)
