from django.core.management.base import CommandError

from gaps.exceptions import GapVectorError
from gaps.forms import RunConfigForm
from gaps.properties import certifies_strict_inclusion, gating_failures
from gaps.reports import checks_table, create_json

from .compute import Command as ComputeCommand

CHECK_FAILURE_EXIT = 4


class Command(ComputeCommand):
    help = 'Compute a gap vector and run the property checks on it; exit 4 if any check fails.'

    def add_arguments(self, parser):
        parser.add_argument('--variety', required=True,
                            help='variety spec, e.g. veronese:n=2,d=3, segre:a=2,b=2, delpezzo:k=6, file:PATH')
        self.add_computation_arguments(parser)

    def handle(self, *args, **options):
        cfg = self.validate(RunConfigForm({**options, 'format': 'json'})).run_config()
        run = self.start_record(cfg)
        try:
            report, checks, variety_class = self.compute(cfg)
        except GapVectorError as e:
            raise self.fail(e, run) from e
        if run is not None:
            run.store_report(report, checks, variety_class)

        self.stdout.write(checks_table(checks), ending='')
        self.stdout.write(f"gap: {list(report.gap)}")
        self.stdout.write(f"class: {variety_class.value} (eps = {report.epsilon})")
        if certifies_strict_inclusion(report):
            self.stdout.write("Sigma(Gamma) != P(Gamma) for generic Gamma of some size")
        if cfg.out:
            self.emit(create_json(report, checks, variety_class), cfg.out)

        failed = gating_failures(checks)
        if failed:
            raise CommandError(
                f"{len(failed)} check(s) failed: {', '.join(check.name for check in failed)}",
                returncode=CHECK_FAILURE_EXIT,
            )
        self.stdout.write(self.style.SUCCESS('all checks passed'))
