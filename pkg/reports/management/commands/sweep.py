from experiments.sweeps import sweep
from reports.commands import SimulationCommand


class Command(SimulationCommand):
    help = "Concurrence over a (phi, t) grid, as CSV, NDJSON or an SVG heatmap"

    def handle(self, *args, **options):
        spec = self.load_experiment(options)
        grid = sweep(spec.layout, spec.chirality, spec.initial, spec.phi_values(), spec.time_values())
        self.emit(grid, spec)
