import io
import json
import math
import os

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from coefficients.calculator import coefficients
from dynamics.hamiltonian import EffectiveHamiltonian
from dynamics.modes import ModeClassification, ModeReport
from dynamics.propagation import AmplitudePair, trajectory
from experiments.calibration import CalibrationResult, ConfigurationCalibration
from experiments.search import MaxResult
from experiments.steady import PhaseKind, SpecialPhase, SteadyStateReport
from experiments.sweeps import SweepGrid, sweep
from layouts.geometry import ChiralitySpec, INITIAL_STATES, InitialState, Preset, make_preset
from reports.config import (ConfigParseException, ConfigValidationException, GridSpec, ReportException,
                            build_experiment, dump_experiment_config, parse_experiment_config)
from reports.serializers import SpecialPhaseTable, serialize_results, tabulate
from reports.svg import color_for, render_svg_heatmap


SAMPLE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "sample_data")


def read_sample(name):
    with open(os.path.join(SAMPLE_DIR, name), "r", encoding="utf-8") as f:
        return f.read()


def small_grid(values, phis=None, times=None):
    values = np.asarray(values, dtype=float)
    phis = np.linspace(0, math.pi, values.shape[0]) if phis is None else np.asarray(phis, dtype=float)
    times = np.linspace(0, 5, values.shape[1]) if times is None else np.asarray(times, dtype=float)
    return SweepGrid(phis, times, values, "custom", "aaabbb", 0.0, 1.0, INITIAL_STATES["EG"])


class TestExperimentConfig(SimpleTestCase):

    # parse_experiment_config()
    def test_parse_preset_document(self):
        spec = parse_experiment_config('{"layout":"fully_braided","chi":1.0,"phi":1.0471975512}')
        self.assertIs(Preset.FULLY_BRAIDED, spec.layout.preset_tag)
        self.assertEqual(1.0, spec.chi)
        self.assertEqual(1.0471975512, spec.phi)
        self.assertEqual(ChiralitySpec(1.0, 1.0), spec.chirality)

    def test_parse_custom_layout_defaults(self):
        spec = parse_experiment_config('{"layout":{"a":[0,1,3],"b":[2,4,5]}}')
        self.assertIs(Preset.CUSTOM, spec.layout.preset_tag)
        self.assertEqual("aababb", spec.layout.ordering)
        self.assertEqual(1.0, spec.gamma_total)
        self.assertEqual(0.0, spec.chi)
        self.assertEqual(INITIAL_STATES["EG"], spec.initial)
        self.assertEqual(GridSpec(0.0, 50.0, 2001), spec.time)
        self.assertEqual(GridSpec(0.0, 2 * math.pi, 2001), spec.phi)
        self.assertEqual({}, spec.options)

    def test_parse_sample_documents(self):
        spec = parse_experiment_config(read_sample("fully_braided.json"))
        self.assertEqual(21, spec.time_values().size)
        self.assertEqual([1.0471975512], list(spec.phi_values()))

        spec = parse_experiment_config(read_sample("custom_partially_braided.json"))
        self.assertEqual(InitialState(0.6, 0.8j), spec.initial)
        self.assertEqual(GridSpec(0.0, 4.0, 9), spec.time)
        self.assertEqual("ndjson", spec.option("format"))

    def test_parse_chi_out_of_range(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"layout":"separated","chi":1.5}')
        self.assertEqual("chi", context.exception.field)

    def test_parse_duplicate_positions(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"layout":{"a":[0,1,2],"b":[2,3,4]}}')
        self.assertEqual("layout", context.exception.field)
        self.assertIn("duplicate position 2", str(context.exception))

    def test_parse_missing_layout(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"chi":0.5}')
        self.assertEqual("layout", context.exception.field)

    def test_parse_unknown_preset(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"layout":"twisted"}')
        self.assertEqual("layout", context.exception.field)

    def test_parse_unknown_field(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"layout":"separated","colour":"red"}')
        self.assertEqual("colour", context.exception.field)

    def test_parse_bad_initial_state(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"layout":"separated","initial":[1,0,1,0]}')
        self.assertEqual("initial", context.exception.field)

    def test_parse_negative_time(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"layout":"separated","time":{"start":-1,"stop":2,"count":3}}')
        self.assertEqual("time", context.exception.field)

    def test_parse_non_positive_gamma(self):
        with self.assertRaises(ConfigValidationException) as context:
            parse_experiment_config('{"layout":"separated","gamma_total":0}')
        self.assertEqual("gamma_total", context.exception.field)

    def test_parse_syntax_error(self):
        with self.assertRaises(ConfigParseException) as context:
            parse_experiment_config('{"layout": "separated",\n "chi": }')
        self.assertEqual(2, context.exception.line)
        self.assertIn("line 2", str(context.exception))

    def test_parse_not_an_object(self):
        with self.assertRaises(ConfigValidationException):
            parse_experiment_config('[1, 2]')

    def test_phase_must_be_finite(self):
        for value in (float("nan"), float("inf")):
            with self.assertRaises(ConfigValidationException) as context:
                build_experiment({"layout": "separated", "phi": value})
            self.assertEqual("phi", context.exception.field)
            self.assertIn("Phase must be a finite number", str(context.exception))

    # dump_experiment_config()
    def test_dump_round_trip(self):
        documents = [
            '{"layout":"fully_braided","chi":1.0,"phi":1.0471975512}',
            '{"layout":{"a":[0,1,3],"b":[2,4,5]},"gamma_total":0.3,"chi":0.1}',
            read_sample("custom_partially_braided.json"),
            '{"layout":"partially_nested","chi_list":[0,0.5],"time_axis":"gamma_r","dt":0.001,"window":5}',
        ]
        for document in documents:
            spec = parse_experiment_config(document)
            self.assertEqual(spec, parse_experiment_config(dump_experiment_config(spec)), msg=document)

    def test_dump_is_deterministic(self):
        spec = build_experiment({"layout": "separated", "phi": 0.1})
        self.assertEqual(dump_experiment_config(spec), dump_experiment_config(spec))


class TestSerializers(SimpleTestCase):

    # serialize_results()
    def test_zero_matrix_trajectory(self):
        traj = trajectory(EffectiveHamiltonian(np.zeros((2, 2), dtype=complex)), INITIAL_STATES["EG"], [0.0])
        self.assertEqual(b"t,c_eg_re,c_eg_im,c_ge_re,c_ge_im,concurrence\n0,1,0,0,0,0\n",
                         serialize_results(traj, "csv"))

    def test_coefficient_dump_decoupled(self):
        c = coefficients(make_preset("separated"), 2 * math.pi / 3, 0.5, 0.5)
        header, row = serialize_results(c, "csv").decode().splitlines()
        self.assertEqual("phi,delta_a,delta_b,gamma_a,gamma_b,gcoll_re,gcoll_im,g_re,g_im", header)
        values = [float(value) for value in row.split(",")]
        self.assertAlmostEqual(2 * math.pi / 3, values[0], places=15)
        for value in values[3:]:
            self.assertLess(abs(value), 1e-12)

    def test_coefficient_grid_rows(self):
        c = coefficients(make_preset("separated"), np.array([0.0, 1.0, 2.0]), 0.5, 0.5)
        lines = serialize_results(c, "csv").decode().splitlines()
        self.assertEqual(4, len(lines))
        self.assertTrue(lines[2].startswith("1,"))

    def test_sweep_rows_phi_major(self):
        grid = small_grid([[0.1, 0.2], [0.3, 0.4]], phis=[0.0, 1.0], times=[0.0, 2.0])
        self.assertEqual(b"phi,t,concurrence\n0,0,0.10000000000000001\n0,2,0.20000000000000001\n"
                         b"1,0,0.29999999999999999\n1,2,0.40000000000000002\n",
                         serialize_results(grid, "csv"))

    def test_csv_seventeen_digits_round_trip(self):
        grid = sweep(make_preset("partially_nested"), ChiralitySpec(1.0, 0.3), INITIAL_STATES["EG"],
                     [0.7], np.linspace(0, 3, 7))
        rows = serialize_results(grid, "csv").decode().splitlines()[1:]
        parsed = [float(row.split(",")[2]) for row in rows]
        self.assertEqual(list(grid.c_matrix[0]), parsed)

    def test_ndjson_max_result(self):
        result = MaxResult(1.0, math.pi / 3, 0.5, AmplitudePair(1 / math.sqrt(2), -1j / math.sqrt(2)))
        line = serialize_results(result, "ndjson").decode()
        self.assertTrue(line.startswith('{"c_eg_im":0.0,'))
        self.assertIn('"c_max":1.0', line)
        self.assertEqual(1, line.count("\n"))
        self.assertEqual(math.pi / 3, json.loads(line)["phi_star"])

    def test_negative_zero_and_nan(self):
        report = SteadyStateReport(False, -0.0, math.nan,
                                   ModeReport((0j, 0j), ModeClassification.PERSISTENT_OSCILLATION, None))
        self.assertEqual(b"is_steady,c_ss,settle_time,classification,predicted_c_ss\n"
                         b"false,0,nan,persistent_oscillation,nan\n",
                         serialize_results(report, "csv"))
        record = json.loads(serialize_results(report, "ndjson"))
        self.assertIsNone(record["settle_time"])
        self.assertIs(False, record["is_steady"])

    def test_special_phases(self):
        phases = [SpecialPhase(2 * math.pi / 3, PhaseKind.DECOUPLED)]
        self.assertEqual(b"phi,kind\n2.0943951023931953,decoupled\n", serialize_results(phases, "csv"))
        self.assertEqual(b"phi,kind\n", serialize_results(SpecialPhaseTable(), "csv"))

    def test_calibration_rows(self):
        entry = ConfigurationCalibration(Preset.SEPARATED, "aaabbb", "aaabbb", 0.0, {}, (), True,
                                         (0.5, 0.5, 0.736, 0.0))
        columns, rows = tabulate(CalibrationResult([entry]))
        self.assertEqual("confirms_default", columns[3])
        self.assertEqual(("separated", "aaabbb", "aaabbb", True, 0.0, True, 0.5, 0.5, 0.736, 0.0), rows[0])

    def test_unknown_format(self):
        with self.assertRaises(ReportException):
            serialize_results(small_grid([[0.0]]), "xml")

    def test_svg_only_for_sweeps(self):
        with self.assertRaises(ReportException):
            serialize_results(MaxResult(1.0, 0.0, 0.0, AmplitudePair(1, 0)), "svg")

    def test_empty_list(self):
        with self.assertRaises(ReportException):
            serialize_results([], "csv")


class TestSvgHeatmap(SimpleTestCase):

    # color_for()
    def test_colormap_anchors(self):
        self.assertEqual((13, 8, 135), color_for(0.0))
        self.assertEqual((204, 71, 120), color_for(0.5))
        self.assertEqual((240, 249, 33), color_for(1.0))
        self.assertEqual((240, 249, 33), color_for(1.2))

    # render_svg_heatmap()
    def test_single_cell_zero(self):
        svg = render_svg_heatmap(small_grid([[0.0]]))
        self.assertEqual(1, svg.count('class="cell"'))
        self.assertIn('fill="rgb(13,8,135)"', svg)

    def test_single_cell_one(self):
        svg = render_svg_heatmap(small_grid([[1.0]]))
        self.assertIn('fill="rgb(240,249,33)"', svg)

    def test_two_by_two(self):
        svg = render_svg_heatmap(small_grid([[0.0, 0.5], [1.0, 0.25]], phis=[0.0, math.pi], times=[0.0, 5.0]))
        self.assertEqual(4, svg.count('class="cell"'))
        self.assertIn(">5</text>", svg)
        self.assertIn(">1</text>", svg)
        self.assertIn("φ/π", svg)
        self.assertIn("γt", svg)
        self.assertTrue(svg.lstrip().startswith("<?xml"))

    def test_deterministic(self):
        grid = small_grid(np.linspace(0, 1, 12).reshape(3, 4))
        self.assertEqual(render_svg_heatmap(grid), render_svg_heatmap(grid))

    def test_empty_grid(self):
        with self.assertRaises(ReportException):
            render_svg_heatmap(SweepGrid(np.array([]), np.array([]), np.zeros((0, 0)), "custom", "aaabbb", 0.0,
                                         1.0, INITIAL_STATES["EG"]))


class TestCommands(SimpleTestCase):

    def run_command(self, name, **options):
        out = io.StringIO()
        call_command(name, stdout=out, stderr=io.StringIO(), **options)
        return out.getvalue()

    def test_coeffs_command(self):
        output = self.run_command("coeffs", preset="separated", phi="2.0943951", chi=0.0)
        header, row = output.splitlines()
        self.assertTrue(header.startswith("phi,delta_a"))
        for value in row.split(",")[3:]:
            self.assertLess(abs(float(value)), 1e-6)

    def test_evolve_command(self):
        output = self.run_command("evolve", preset="fully_braided", phi="1.0471975511965976", t="0:1:11")
        self.assertEqual(12, len(output.splitlines()))

    def test_evolve_numeric_uses_default_step(self):
        options = dict(preset="fully_nested", phi="0.7", t="0:2:5", format="ndjson")
        exact = [json.loads(line) for line in self.run_command("evolve", **options).splitlines()]
        numeric = [json.loads(line) for line in self.run_command("evolve", numeric=True, **options).splitlines()]
        self.assertEqual(len(exact), len(numeric))
        for left, right in zip(exact, numeric):
            self.assertAlmostEqual(left["concurrence"], right["concurrence"], delta=1e-6)
            self.assertAlmostEqual(left["c_eg_re"], right["c_eg_re"], delta=1e-6)

    def test_evolve_needs_single_phase(self):
        with self.assertRaises(CommandError) as context:
            self.run_command("evolve", preset="fully_braided")
        self.assertEqual(1, context.exception.returncode)

    def test_evolve_steady(self):
        output = self.run_command("evolve", preset="separated", phi="0", steady=True)
        header, row = output.splitlines()
        self.assertEqual("is_steady,c_ss,settle_time,classification,predicted_c_ss", header)
        self.assertTrue(row.startswith("true,"))

    def test_sweep_command_svg(self):
        output = self.run_command("sweep", preset="fully_braided", phi="0:3.14:3", t="0:1:4", format="svg")
        self.assertEqual(12, output.count('class="cell"'))

    def test_find_max_command(self):
        output = self.run_command("find_max", preset="separated", chi=1.0, initial="ge", phi_points=51,
                                  t_points=201, format="ndjson")
        self.assertLess(json.loads(output)["c_max"], 1e-12)

    def test_chirality_scan_command(self):
        output = self.run_command("chirality_scan", preset="fully_braided", phi="1.0471975511965976",
                                  t="0:1:5", chis="0,1")
        lines = output.splitlines()
        self.assertEqual("chi,peak_count,t,concurrence", lines[0])
        self.assertEqual(11, len(lines))

    def test_compare_initial_command(self):
        output = self.run_command("compare_initial", preset="separated", phi="0:3:4", t="0:2:3")
        self.assertEqual(13, len(output.splitlines()))

    def test_special_phases_command(self):
        output = self.run_command("special_phases", preset="separated")
        self.assertIn("decoupled", output)

    def test_validation_error_code(self):
        with self.assertRaises(CommandError) as context:
            self.run_command("sweep", preset="separated", chi=1.5)
        self.assertEqual(1, context.exception.returncode)

    def test_bad_grid_flag(self):
        with self.assertRaises(CommandError) as context:
            self.run_command("sweep", preset="separated", t="0:1")
        self.assertEqual(1, context.exception.returncode)

    def test_missing_config_code(self):
        with self.assertRaises(CommandError) as context:
            self.run_command("sweep", config=os.path.join(SAMPLE_DIR, "missing.json"))
        self.assertEqual(2, context.exception.returncode)

    def test_config_with_flag_override(self):
        output = self.run_command("evolve", config=os.path.join(SAMPLE_DIR, "fully_braided.json"), t="0:1:3")
        self.assertEqual(4, len(output.splitlines()))
