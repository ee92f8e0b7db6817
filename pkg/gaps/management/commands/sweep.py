import logging

from django.core.management.base import CommandError

from gaps.dims import gap_vector
from gaps.exceptions import GapVectorError
from gaps.forms import SweepForm
from gaps.properties import classify, conjecture_match, conjecture_values, run_checks
from gaps.reports import create_sweep_csv, sweep_row
from gaps.variety import from_spec

from ._base import GapCommand

logger = logging.getLogger(__name__)


class Command(GapCommand):
    help = 'Compute gap vectors over a parameter range and write one CSV row per instance.'

    def add_arguments(self, parser):
        parser.add_argument('range_spec', help='range spec, e.g. veronese:n=2,d=2..6')
        self.add_computation_arguments(parser)

    def handle(self, *args, **options):
        form = self.validate(SweepForm(options))
        rows = []
        exit_code = 0
        for cfg in form.run_configs():
            run = self.start_record(cfg)
            try:
                row = self.compute_row(cfg, run)
            except GapVectorError as e:
                logger.warning("%s failed: %s", cfg.variety, e)
                if run is not None:
                    run.mark_failed(e)
                row = sweep_row(cfg.variety, error=f"{e.__class__.__name__}: {e}")
                exit_code = max(exit_code, e.exit_code)
            rows.append(row)

        self.emit(create_sweep_csv(rows), form.cleaned_data['out'])
        if exit_code:
            failed = sum(1 for row in rows if row['error'])
            raise CommandError(f"{failed} of {len(rows)} instance(s) failed", returncode=exit_code)

    def compute_row(self, cfg, run=None):
        variety = from_spec(cfg.variety, seed=cfg.seed)
        report = gap_vector(variety, cfg.rank_config())
        logger.info("%s: gap %s", cfg.variety, report.gap)
        conjecture = None
        if report.family == 'veronese':
            options = report.options
            j_bar, _ = conjecture_values(options['n'], options['d'])
            conjecture = (j_bar, conjecture_match(report))
        if run is not None:
            run.store_report(report, run_checks(report), classify(report))
        return sweep_row(cfg.variety, report, conjecture)
