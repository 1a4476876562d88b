"""Variant derivation and the exhaustive correctness/completeness oracle."""
import dataclasses
import enum
import itertools
import logging
from typing import NamedTuple, Tuple

from django.conf import settings

from .errors import Diagnostic, InvalidSelection, TypeCheckError, VariantOverflow, accepted
from .evaluation import NORMAL, Stuck, eval_step
from .lookup import subtype
from .pl_typecheck import typecheck_product_line
from .syntax import OBJECT, Cast, New, is_value
from .tables import FfjProgram, Mode, assemble_tables, sanity_violations
from .typecheck import typecheck_program, typecheck_term

logger = logging.getLogger(__name__)


def derive(pl, selection):
    """The FFJ program made of the selected features' declarations."""
    fm = pl.feature_model
    selection = fm.sort(selection)
    if not pl.analysis.valid_selection(selection):
        raise InvalidSelection(selection)
    chosen = set(selection)
    declarations = [d for d in pl.declarations if d.feature in chosen]
    tables = assemble_tables(declarations, fm)
    violations = sanity_violations(tables, Mode.FFJ)
    main_term = pl.main_term if pl.main_context in chosen else New(OBJECT)
    return FfjProgram(main_term, tables.class_table, tables.refinement_table, selection,
                      tuple(tables.class_table.values()), tuple(violations))


class Enumeration(NamedTuple):
    selections: Tuple[Tuple[str, ...], ...]
    truncated: bool


def enumerate_valid_selections(fm, cap=None):
    """All valid selections, smallest first per feature; at most ``cap`` of them."""
    selections = []
    truncated = False
    for bits in itertools.product((False, True), repeat=len(fm.features)):
        selection = tuple(f for f, on in zip(fm.features, bits) if on)
        if not fm.evaluate(selection):
            continue
        if cap is not None and len(selections) >= cap:
            truncated = True
            break
        selections.append(selection)
    return Enumeration(tuple(selections), truncated)


def _progress_shape(stuck):
    redex = stuck.redex
    return isinstance(redex, Cast) and is_value(redex.operand)


def check_trace(program, fuel):
    """Preservation and progress violations along the main term's evaluation."""
    ct, rt = program.class_table, program.refinement_table
    term = program.main_term
    try:
        current = typecheck_term(ct, rt, {}, term)
    except TypeCheckError:
        return []
    for _ in range(fuel):
        result = eval_step(ct, rt, term)
        if result is NORMAL:
            return []
        if isinstance(result, Stuck):
            if _progress_shape(result) and not subtype(ct, result.redex.operand.class_name, result.redex.target):
                return []
            return [Diagnostic('progress', f'well-typed term stuck at {result.redex}', result.redex.location)]
        try:
            successor = typecheck_term(ct, rt, {}, result)
        except TypeCheckError as exc:
            return [Diagnostic('preservation', f'successor {result} is ill-typed: {exc.message}', result.location)]
        if not subtype(ct, successor, current):
            return [Diagnostic('preservation', f'type {successor} of {result} is not a subtype of {current}',
                               result.location)]
        term, current = result, successor
    return []


@dataclasses.dataclass(frozen=True)
class VariantResult:
    selection: Tuple[str, ...]
    diagnostics: Tuple[Diagnostic, ...] = ()
    trace_violations: Tuple[Diagnostic, ...] = ()

    @property
    def well_typed(self):
        return accepted(self.diagnostics)

    @property
    def failures(self):
        return [d for d in self.diagnostics + self.trace_violations if d.is_error]


@dataclasses.dataclass(frozen=True)
class Survey:
    """The product-line verdict next to every variant's verdict."""
    diagnostics: Tuple[Diagnostic, ...]
    variants: Tuple[VariantResult, ...]

    @property
    def accepted(self):
        return accepted(self.diagnostics)


class Outcome(enum.Enum):
    PASS = 'PASS'
    COUNTEREXAMPLE = 'COUNTEREXAMPLE'
    NOT_APPLICABLE = 'NOT-APPLICABLE'


@dataclasses.dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    counterexamples: Tuple[VariantResult, ...] = ()
    diagnostics: Tuple[Diagnostic, ...] = ()


def survey(pl, cap=None, fuel=None):
    """Check the product line and every valid variant of it.

    ``fuel`` enables the evaluation trace check of each well-typed variant;
    0 disables it.
    """
    if cap is None:
        cap = settings.FFJ_MAX_VARIANTS
    if fuel is None:
        fuel = settings.FFJ_ORACLE_FUEL
    enumeration = enumerate_valid_selections(pl.feature_model, cap)
    if enumeration.truncated:
        raise VariantOverflow(f'more than {cap} valid variants')
    variants = []
    for selection in enumeration.selections:
        program = derive(pl, selection)
        diagnostics = tuple(typecheck_program(program))
        trace = ()
        if fuel and accepted(diagnostics):
            trace = tuple(check_trace(program, fuel))
        logger.debug('variant [%s]: %d diagnostic(s)', ','.join(selection), len(diagnostics) + len(trace))
        variants.append(VariantResult(selection, diagnostics, trace))
    result = Survey(tuple(typecheck_product_line(pl)), tuple(variants))
    logger.info('surveyed %d variant(s); product line %s', len(variants),
                'accepted' if result.accepted else 'rejected')
    return result


def check_correctness(pl, surveyed=None):
    """A well-typed product line must derive only well-typed variants."""
    surveyed = surveyed or survey(pl)
    if not surveyed.accepted:
        return Verdict(Outcome.NOT_APPLICABLE)
    bad = tuple(v for v in surveyed.variants if v.failures)
    if bad:
        return Verdict(Outcome.COUNTEREXAMPLE, bad)
    return Verdict(Outcome.PASS)


def check_completeness(pl, surveyed=None):
    """A product line whose variants are all well-typed must be accepted."""
    surveyed = surveyed or survey(pl)
    if not all(v.well_typed for v in surveyed.variants):
        return Verdict(Outcome.NOT_APPLICABLE)
    if surveyed.accepted:
        return Verdict(Outcome.PASS)
    errors = tuple(d for d in surveyed.diagnostics if d.is_error)
    return Verdict(Outcome.COUNTEREXAMPLE, diagnostics=errors)


def render_report(surveyed, correctness, completeness):
    lines = []
    for variant in surveyed.variants:
        selection = '[' + ','.join(variant.selection) + ']'
        failures = variant.failures
        if not failures:
            lines.append(f'PASS {selection}')
        lines += [f'FAIL {selection} {d.code} {d.location}' for d in failures]
    lines.append(f'CORRECTNESS {correctness.outcome.value}')
    lines.append(f'COMPLETENESS {completeness.outcome.value}')
    return lines
