from coefficients.calculator import coefficients
from reports.commands import SimulationCommand


class Command(SimulationCommand):
    help = "Lamb shifts, decays and exchange coupling at one phase or over a phase grid"

    def handle(self, *args, **options):
        spec = self.load_experiment(options)
        gamma_right, gamma_left = spec.chirality.rates()
        phi = spec.phi if isinstance(spec.phi, float) else spec.phi_values()

        self.emit(coefficients(spec.layout, phi, gamma_right, gamma_left), spec)
