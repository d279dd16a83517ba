"""
Standalone entry point: ``python -m reports.cli <subcommand> [flags]``.

Runs the simulation management commands without manage.py and returns the documented
exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 numerical failure.

"""
import os
import sys
from typing import Optional, Sequence

import django
from django.core.management import load_command_class
from django.core.management.base import CommandError

from reports.commands import EXIT_VALIDATION


PROG = "waveguide"

SUBCOMMANDS = {
    "coeffs": "coeffs",
    "evolve": "evolve",
    "sweep": "sweep",
    "find-max": "find_max",
    "special-phases": "special_phases",
    "chirality-scan": "chirality_scan",
    "compare-initial": "compare_initial",
    "calibrate": "calibrate",
}


def usage() -> str:
    return f"usage: {PROG} {{{','.join(SUBCOMMANDS)}}} [flags]\n"


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        if argv and argv[0] in ("-h", "--help"):
            sys.stdout.write(usage())
            return 0
        sys.stderr.write(usage())
        if argv:
            sys.stderr.write(f"{PROG}: unknown subcommand {argv[0]!r}\n")
        return EXIT_VALIDATION

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'giantwaveguide.settings')
    django.setup()

    subcommand = argv[0]
    command = load_command_class("reports", SUBCOMMANDS[subcommand])
    parser = command.create_parser(PROG, subcommand)

    # Parser errors raise CommandError here instead of exiting
    try:
        options = vars(parser.parse_args(argv[1:]))
    except CommandError as e:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"{PROG} {subcommand}: {e}\n")
        return EXIT_VALIDATION
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_VALIDATION

    args = options.pop('args', ())
    try:
        command.execute(*args, **options)
    except CommandError as e:
        sys.stderr.write(f"{PROG} {subcommand}: {e}\n")
        return e.returncode
    return 0


if __name__ == "__main__":
    sys.exit(cli_main())
