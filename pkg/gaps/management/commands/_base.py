import logging
import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from gaps.models import GapRun

logger = logging.getLogger(__name__)

VERBOSITY_LEVELS = {2: logging.INFO, 3: logging.DEBUG}


class GapCommand(BaseCommand):
    """Shared plumbing of the compute, verify and sweep commands.

    Library errors become CommandError with the error's exit code, and
    argument errors exit 1 instead of argparse's 2.
    """

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # Raise CommandError on bad arguments so run_from_argv can pick the exit code.
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            self.stderr.write(f"{e.__class__.__name__}: {e}")
            sys.exit(e.returncode)

    def add_computation_arguments(self, parser):
        parser.add_argument('--mode', choices=['qq', 'fp'], default=settings.GAPVEC_MODE,
                            help='qq: exact rationals; fp: a baked-in 62-bit prime (default: %(default)s)')
        parser.add_argument('--seed', type=int, default=settings.GAPVEC_SEED,
                            help='64-bit sampling seed (default: %(default)s)')
        parser.add_argument('--trials', type=int, default=settings.GAPVEC_TRIALS,
                            help='maximum rank trials per table (default: %(default)s)')
        parser.add_argument('--margin', type=int, default=settings.GAPVEC_MARGIN,
                            help='extra sample rows per evaluation table (default: %(default)s)')
        parser.add_argument('--prime-index', type=int, default=settings.GAPVEC_PRIME_INDEX,
                            help='baked-in prime used in fp mode (default: %(default)s)')
        parser.add_argument('--workers', type=int, default=settings.GAPVEC_WORKERS,
                            help='worker processes for per-j work; output does not depend on it')
        parser.add_argument('--nested', action='store_true',
                            help='use the first j points of one chain of c points for every j')
        parser.add_argument('--record', action='store_true',
                            help='store the run in the database archive')
        parser.add_argument('--out', default='', help='write the report to this path instead of stdout')

    def execute(self, *args, **options):
        level = VERBOSITY_LEVELS.get(options.get('verbosity', 1))
        if level is not None:
            logging.getLogger('gaps').setLevel(level)
        return super().execute(*args, **options)

    def validate(self, form):
        if not form.is_valid():
            raise CommandError(form.error_text(), returncode=1)
        return form

    def start_record(self, cfg):
        if not cfg.record:
            return None
        return GapRun.objects.create(
            variety_spec=cfg.variety,
            mode=cfg.mode,
            prime=cfg.ctx.prime,
            seed=str(cfg.seed),
            trials=cfg.trials,
            margin=cfg.margin,
            nested=cfg.nested,
            status='processing',
        )

    def fail(self, error, run=None):
        """Turn a library error into the CommandError carrying its exit code."""
        if run is not None:
            run.mark_failed(error)
        logger.debug("command failed", exc_info=error)
        return CommandError(str(error), returncode=error.exit_code)

    def emit(self, text, out=''):
        if out:
            with open(out, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            logger.info("wrote %s", out)
        else:
            self.stdout.write(text, ending='')
