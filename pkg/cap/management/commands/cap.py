from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser

from cap.exceptions import ScenarioError
from cap.harness import CHECK_PHASES, COMPARE_PHASES, FORMATS, PHASES, emit, run_suite
from cap.scenarios import load_scenario, with_overrides

# sysexits.h
EX_USAGE = 64
EX_DATAERR = 65
EX_IOERR = 74

# failure counts stay below the reserved codes
MAX_FAILURE_CODE = 63

ACTIONS = {
    'check': (CHECK_PHASES, "run the mapping-class verifiers and the theorem-condition gate"),
    'run': (PHASES, "run every phase of a scenario"),
    'compare': (COMPARE_PHASES, "race the requested schemes to the stop tolerance"),
    'suite': (PHASES, "run every bundled scenario"),
}


class UsageParser(CommandParser):
    """Argument errors inside an action exit with EX_USAGE instead of argparse's 2."""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage()
            self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=EX_USAGE)


class Command(BaseCommand):
    help = "Check, run and compare common attractive point scenarios."

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', title='actions', parser_class=UsageParser)
        for action, (_, summary) in ACTIONS.items():
            sub = subparsers.add_parser(action, help=summary,
                                        called_from_command_line=parser.called_from_command_line)
            if action == 'suite':
                sub.add_argument('--scenario', type=Path,
                                 help="directory of scenario files (default: the bundled set)")
            else:
                sub.add_argument('--scenario', type=Path, required=True, help="scenario JSON file")
            sub.add_argument('--out', type=Path, help="directory receiving one sub-directory per scenario")
            sub.add_argument('--format', dest='output_format', choices=FORMATS, default='csv',
                             help="trace file format")
            sub.add_argument('--seed', type=int, help="override the scenario seed")
            sub.add_argument('--tol', type=float, help="override the scenario tolerance")

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except SystemExit as exc:
            # argparse reports top-level usage errors with status 2
            if exc.code == 2:
                raise SystemExit(EX_USAGE)
            raise

    def handle(self, *args, action=None, **options):
        if action is None:
            raise CommandError(f"choose an action: {', '.join(ACTIONS)}", returncode=EX_USAGE)
        phases = ACTIONS[action][0]
        try:
            scenarios = self.load(action, options)
            bundles = run_suite(scenarios, phases)
            if options['out'] is not None:
                for bundle in bundles:
                    emit(bundle, options['output_format'], options['out'])
        except ScenarioError as exc:
            raise CommandError(str(exc), returncode=EX_DATAERR)
        except OSError as exc:
            raise CommandError(f"cannot write {exc.filename}: {exc.strerror}", returncode=EX_IOERR)

        for bundle in bundles:
            self.report(action, bundle)
        failures = sum(bundle.failures for bundle in bundles)
        if failures:
            raise CommandError(f"{failures} verdict(s) failed", returncode=min(failures, MAX_FAILURE_CODE))
        self.stdout.write(self.style.SUCCESS(f"{len(bundles)} scenario(s), all verdicts pass"))

    def load(self, action, options):
        if action == 'suite':
            directory = options['scenario'] or Path(settings.CAP_BUNDLED_DIR)
            paths = sorted(directory.glob('*.json'))
            if not paths:
                raise ScenarioError(directory, {'__all__': ["no scenario files found"]})
        else:
            paths = [options['scenario']]
        return [with_overrides(load_scenario(path), options['seed'], options['tol']) for path in paths]

    def report(self, action, bundle):
        self.stdout.write(self.style.MIGRATE_HEADING(bundle.scenario.name))
        if bundle.error:
            self.stdout.write(self.style.ERROR(f"  error: {bundle.error}"))
        if action == 'compare':
            for row in bundle.comparison:
                iterations = 'inf' if row.iterations is None else row.iterations
                self.stdout.write(f"  {row.scheme:<22} {iterations:>8}  residual {row.final_residual:.3e}")
        for verdict in bundle.verdicts:
            style = self.style.SUCCESS if verdict.passed else self.style.ERROR
            self.stdout.write(f"  {verdict.key:<36} observed {verdict.observed!s:<5} "
                              f"expected {verdict.expected!s:<5} " + style('pass' if verdict.passed else 'FAIL'))
