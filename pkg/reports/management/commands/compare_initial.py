from experiments.sweeps import compare_initial_states
from reports.commands import SimulationCommand


class Command(SimulationCommand):
    help = "Concurrence from |e_a g_b> against |g_a e_b> over a (phi, t) grid"

    def handle(self, *args, **options):
        spec = self.load_experiment(options)
        comparison = compare_initial_states(spec.layout, spec.chirality, spec.phi_values(), spec.time_values())
        self.stderr.write(f"Largest difference: {comparison.max_delta:.3e}")
        self.emit(comparison, spec)
