import logging

from gaps.dims import gap_vector
from gaps.exceptions import GapVectorError
from gaps.forms import RunConfigForm
from gaps.properties import classify, run_checks
from gaps.reports import generate_output
from gaps.variety import from_spec

from ._base import GapCommand

logger = logging.getLogger(__name__)


class Command(GapCommand):
    help = 'Compute the gap vector of a variety and write a JSON or CSV report.'

    def add_arguments(self, parser):
        parser.add_argument('--variety', required=True,
                            help='variety spec, e.g. veronese:n=2,d=3, segre:a=2,b=2, delpezzo:k=6, file:PATH')
        parser.add_argument('--format', choices=['json', 'csv'], default='json')
        self.add_computation_arguments(parser)

    def handle(self, *args, **options):
        cfg = self.validate(RunConfigForm(options)).run_config()
        run = self.start_record(cfg)
        try:
            report, checks, variety_class = self.compute(cfg)
        except GapVectorError as e:
            raise self.fail(e, run) from e
        if run is not None:
            run.store_report(report, checks, variety_class)
        self.emit(generate_output(report, checks, cfg.format, variety_class), cfg.out)

    def compute(self, cfg):
        variety = from_spec(cfg.variety, seed=cfg.seed)
        logger.info("computing %s over %s", variety, cfg.ctx)
        report = gap_vector(variety, cfg.rank_config())
        return report, run_checks(report), classify(report)
