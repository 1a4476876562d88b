from pathlib import Path

from django.conf import settings
from django.core.cache import caches
from django.core.management.base import BaseCommand, CommandError
from django.utils.translation import gettext as _

from ffjpl.derivation import (
    check_completeness, check_correctness, derive, render_report, survey,
)
from ffjpl.errors import FfjError, InvalidSelection, accepted
from ffjpl.evaluation import OutOfFuel, Stuck, evaluate
from ffjpl.featuremodel import mandatory_model
from ffjpl.parser import parse_feature_model, parse_selection
from ffjpl.pl_typecheck import typecheck_product_line
from ffjpl.syntax import render_declaration, render_term
from ffjpl.tables import ingest, read_text
from ffjpl.typecheck import typecheck_program

USAGE_ERROR = 2
CHECK_FAILED = 1


class Command(BaseCommand):
    help = 'Check, derive, evaluate and test feature-oriented product lines.'
    requires_system_checks = []

    def add_arguments(self, parser):
        commands = parser.add_subparsers(dest='subcommand', required=True, metavar='{check,derive,eval,oracle}')
        common = {'called_from_command_line': parser.called_from_command_line}

        check = commands.add_parser('check', help='type check a whole product line', **common)
        self.add_product_line_arguments(check)

        derive_cmd = commands.add_parser('derive', help='write the variant of a feature selection', **common)
        self.add_product_line_arguments(derive_cmd)
        derive_cmd.add_argument('--selection', required=True, help='selection file (.sel)')
        derive_cmd.add_argument('--out', required=True, help='output directory')

        eval_cmd = commands.add_parser('eval', help='evaluate the main term of a variant', **common)
        self.add_product_line_arguments(eval_cmd)
        eval_cmd.add_argument('--selection', required=True, help='selection file (.sel)')
        eval_cmd.add_argument('--fuel', type=int, help='maximum number of evaluation steps')

        oracle = commands.add_parser('oracle', help='check every valid variant against the product line',
                                     **common)
        self.add_product_line_arguments(oracle)
        oracle.add_argument('--max-variants', type=int, help='refuse product lines with more valid variants')
        oracle.add_argument('--fuel', type=int, help='evaluation steps checked per variant, 0 to skip')

    def add_product_line_arguments(self, parser):
        parser.add_argument('--root', required=True, help='directory with one subdirectory per feature')
        parser.add_argument('--model', required=True, help='feature model file (.features)')
        parser.add_argument('--no-cache', action='store_true', help='do not cache feature-model queries')

    def handle(self, *args, **options):
        handler = getattr(self, 'handle_' + options['subcommand'])
        try:
            handler(options)
        except InvalidSelection as exc:
            raise CommandError(str(exc), returncode=CHECK_FAILED) from exc
        except FfjError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except RecursionError:
            # class hierarchies are walked recursively; terms are bounded by the parser
            raise CommandError(_('input nested too deeply'), returncode=USAGE_ERROR) from None

    def load(self, options):
        model_path = options['model']
        model = parse_feature_model(read_text(model_path), filename=Path(model_path).name)
        alias = settings.FFJ_NO_QUERY_CACHE if options['no_cache'] else settings.FFJ_QUERY_CACHE
        return ingest(options['root'], model, cache=caches[alias])

    def write_diagnostics(self, diagnostics):
        for diagnostic in diagnostics:
            self.stdout.write(diagnostic.render())

    def handle_check(self, options):
        pl = self.load(options)
        diagnostics = typecheck_product_line(pl)
        self.write_diagnostics(diagnostics)
        if not accepted(diagnostics):
            errors = sum(1 for d in diagnostics if d.is_error)
            raise CommandError(_('product line is ill-typed: %(count)d error(s)') % {'count': errors},
                               returncode=CHECK_FAILED)

    def variant(self, options):
        pl = self.load(options)
        path = options['selection']
        selection = parse_selection(read_text(path), filename=Path(path).name)
        return pl, derive(pl, selection)

    def handle_derive(self, options):
        pl, program = self.variant(options)
        out = Path(options['out'])
        by_file = {}
        for decl in program.declarations:
            by_file.setdefault(decl.location.file, []).append(decl)
        try:
            for feature, filename in pl.sources:
                if feature not in program.features:
                    continue
                chunks = [render_declaration(d) for d in by_file.get(filename, [])]
                if filename == pl.main_file:
                    chunks.append(render_term(program.main_term))
                target = out / filename
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text('\n\n'.join(chunks) + '\n' if chunks else '', encoding='utf-8')
            out.mkdir(parents=True, exist_ok=True)
            (out / 'variant.features').write_text(str(mandatory_model(program.features)), encoding='utf-8')
        except OSError as exc:
            raise CommandError(_('cannot write variant: %(error)s') % {'error': exc},
                               returncode=USAGE_ERROR) from exc

    def handle_eval(self, options):
        pl, program = self.variant(options)
        diagnostics = typecheck_program(program)
        if not accepted(diagnostics):
            self.write_diagnostics(diagnostics)
            raise CommandError(_('refusing to evaluate an ill-typed variant'), returncode=CHECK_FAILED)
        fuel = options['fuel'] if options['fuel'] is not None else settings.FFJ_EVAL_FUEL
        if fuel < 1:
            raise CommandError(_('--fuel must be positive'), returncode=USAGE_ERROR)
        result = evaluate(program.class_table, program.refinement_table, program.main_term, fuel)
        if isinstance(result, (Stuck, OutOfFuel)):
            self.stdout.write(str(result))
        else:
            self.stdout.write(render_term(result))

    def handle_oracle(self, options):
        cap = options['max_variants'] if options['max_variants'] is not None else settings.FFJ_MAX_VARIANTS
        if cap < 1:
            raise CommandError(_('--max-variants must be positive'), returncode=USAGE_ERROR)
        fuel = options['fuel'] if options['fuel'] is not None else settings.FFJ_ORACLE_FUEL
        if fuel < 0:
            raise CommandError(_('--fuel must not be negative'), returncode=USAGE_ERROR)
        pl = self.load(options)
        surveyed = survey(pl, cap, fuel)
        correctness = check_correctness(pl, surveyed)
        completeness = check_completeness(pl, surveyed)
        lines = render_report(surveyed, correctness, completeness)
        for line in lines:
            self.stdout.write(line)
        if any(line.startswith('FAIL ') for line in lines) or 'COUNTEREXAMPLE' in (
                correctness.outcome.value, completeness.outcome.value):
            raise CommandError(_('oracle found failing variants or counterexamples'), returncode=CHECK_FAILED)
