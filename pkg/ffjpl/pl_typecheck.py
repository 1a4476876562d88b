"""Type checking of whole product lines.

A term is checked once under the feature that contains it, and may have
several types: one for each alternative the feature model leaves open.
"""
import logging

from .errors import Diagnostic, Severity, TypeCheckError, sort_diagnostics
from .lookup import last
from .pl_lookup import (
    fields_pl, introduce_class_pl, introduce_field_pl, introduce_method_pl, mtype_pl, override_pl, refine_pl,
    subtype_pl,
)
from .syntax import THIS, Atom, Cast, ClassDecl, FieldAccess, Invoke, New, Var
from .tables import FieldRef, MethodRef, QualifiedType

logger = logging.getLogger(__name__)


def _unique(items):
    return list(dict.fromkeys(items))


class _Checker:
    """Term typing and well-formedness under one context feature."""

    def __init__(self, pl, phi, warnings=None, normalize=True):
        self.pl = pl
        self.phi = phi
        self.context = (phi,)
        self.warnings = warnings
        self.normalize = normalize

    def diagnostic(self, code, message, location, severity=Severity.ERROR):
        return Diagnostic(code, message, location, severity, self.context)

    def fail(self, code, message, location):
        raise TypeCheckError([self.diagnostic(code, message, location)])

    def types(self, items):
        return _unique(items) if self.normalize else list(items)

    def missing(self, element, kind, location):
        """A diagnostic for an element not present in every variant of the context.

        ``unknown-*`` when no variant has it, ``unreachable-*`` otherwise.
        """
        analysis, it = self.pl.analysis, self.pl.introduction_table
        if analysis.reachable(it, self.context, element):
            return None
        if analysis.possible(it, self.context, element):
            return self.diagnostic(f'unreachable-{kind}', f'{kind} {element} is not present in every variant '
                                   f'with {self.phi}', location)
        return self.diagnostic(f'unknown-{kind}', f'no variant with {self.phi} has {kind} {element}', location)

    def require(self, element, kind, location):
        problem = self.missing(element, kind, location)
        if problem is not None:
            raise TypeCheckError([problem])

    def subtype(self, c, e):
        return subtype_pl(self.pl, self.context, c, e)

    def term(self, env, term):
        if isinstance(term, Var):
            if term.name not in env:
                self.fail('unknown-variable', f"unknown variable '{term.name}'", term.location)
            return [env[term.name]]
        if isinstance(term, FieldAccess):
            return self.field_access(env, term)
        if isinstance(term, Invoke):
            return self.invoke(env, term)
        if isinstance(term, New):
            return self.new(env, term)
        if isinstance(term, Cast):
            return self.cast(env, term)
        raise TypeError(f'not a term: {term!r}')

    def field_access(self, env, term):
        receivers = self.term(env, term.receiver)
        for receiver in receivers:
            self.require(FieldRef(receiver, term.field), 'field', term.location)
        found = []
        for receiver in receivers:
            for inner in fields_pl(self.pl, self.context, last(self.pl.refinement_table, receiver)):
                entries = [e for e in inner if e.name == term.field]
                if not entries:
                    self.fail('unreachable-field', f'field {receiver}.{term.field} is missing in some '
                              f'variant with {self.phi}', term.location)
                guaranteed = [e for e in entries if not e.optional]
                found += [e.class_name for e in (guaranteed or entries)]
        return self.types(found)

    def invoke(self, env, term):
        receivers = self.term(env, term.receiver)
        for receiver in receivers:
            self.require(MethodRef(receiver, term.method), 'method', term.location)
        signatures = []
        for receiver in receivers:
            signatures += mtype_pl(self.pl, self.context, term.method, last(self.pl.refinement_table, receiver))
        signatures = self.types(signatures)
        if not signatures:
            self.fail('unreachable-method', f'method {receivers[0]}.{term.method} has no signature in some '
                      f'variant with {self.phi}', term.location)
        args = [self.term(env, a) for a in term.args]
        problems = []
        for signature in signatures:
            if len(signature.param_types) != len(args):
                problems.append(self.diagnostic(
                    'arity-mismatch', f'{term.method}{signature} expects {len(signature.param_types)} '
                    f'argument(s), got {len(args)}', term.location))
                continue
            for i, (expected, actuals) in enumerate(zip(signature.param_types, args)):
                for actual in actuals:
                    if not self.subtype(actual, expected):
                        problems.append(self.diagnostic(
                            'argument-type', f'argument {i + 1} of {term.method}: {actual} is not a subtype of '
                            f'{expected}', term.args[i].location))
        if problems:
            raise TypeCheckError(problems)
        return self.types(s.return_type for s in signatures)

    def new(self, env, term):
        self.require(term.class_name, 'class', term.location)
        args = [self.term(env, a) for a in term.args]
        alternatives = fields_pl(self.pl, self.context, last(self.pl.refinement_table, term.class_name))
        problems = []
        for inner in alternatives:
            optional = [e for e in inner if e.optional]
            if optional:
                problems.append(self.diagnostic(
                    'optional-field', f'new {term.class_name}: field {optional[0].name} ({optional[0].origin}) '
                    f'is not present in every variant with {self.phi}', term.location))
                continue
            if len(inner) != len(args):
                problems.append(self.diagnostic(
                    'arity-mismatch', f'new {term.class_name} expects {len(inner)} argument(s), got {len(args)}',
                    term.location))
                continue
            for i, (entry, actuals) in enumerate(zip(inner, args)):
                for actual in actuals:
                    if not self.subtype(actual, entry.class_name):
                        problems.append(self.diagnostic(
                            'argument-type', f'field {entry.name} of {term.class_name}: {actual} is not a subtype '
                            f'of {entry.class_name}', term.args[i].location))
        if problems:
            raise TypeCheckError(problems)
        return [term.class_name]

    def cast(self, env, term):
        operands = self.term(env, term.operand)
        self.require(term.target, 'class', term.location)
        unrelated = [e for e in operands if not self.subtype(e, term.target) and not self.subtype(term.target, e)]
        if unrelated and self.warnings is not None:
            self.warnings.append(self.diagnostic(
                'stupid-cast', f'cast of {unrelated[0]} to unrelated {term.target}', term.location,
                Severity.STUPID_WARNING))
        return [term.target]

    def reachability(self, class_name, location):
        problem = self.missing(class_name, 'class', location)
        return [problem] if problem is not None else []

    def method(self, method, qt):
        diagnostics = []
        for p in method.params:
            diagnostics += self.reachability(p.class_name, method.location)
        diagnostics += self.reachability(method.return_type, method.location)
        env = {p.name: p.class_name for p in method.params}
        env[THIS] = qt.class_name
        try:
            for body in self.term(env, method.body):
                if not self.subtype(body, method.return_type):
                    diagnostics.append(self.diagnostic(
                        'return-type', f'{qt}.{method.name} may return {body}, not a subtype of '
                        f'{method.return_type}', method.location))
                    break
        except TypeCheckError as exc:
            diagnostics += exc.diagnostics
        if method.overrides:
            if not override_pl(self.pl, self.context, method.name, qt, method.signature):
                diagnostics.append(self.diagnostic(
                    'invalid-override', f'{qt}.{method.name} does not override a method with signature '
                    f'{method.signature} in every variant', method.location))
        elif not introduce_method_pl(self.pl, self.context, qt, method.name):
            diagnostics.append(self.diagnostic(
                'occluding-method', f'{qt}.{method.name} may occlude an existing method', method.location))
        return diagnostics

    def declaration(self, decl):
        qt = QualifiedType(decl.feature, decl.name)
        diagnostics = []
        if isinstance(decl, ClassDecl):
            if not introduce_class_pl(self.pl, self.context, qt):
                diagnostics.append(self.diagnostic(
                    'duplicate-class', f'class {decl.name} may be introduced by another feature as well',
                    decl.location))
            diagnostics += self.reachability(decl.superclass, decl.location)
        elif not refine_pl(self.pl, self.context, qt):
            diagnostics.append(self.diagnostic(
                'refinement-target', f'{qt} refines a class not introduced before it in every variant',
                decl.location))
        for f in decl.fields:
            diagnostics += self.reachability(f.class_name, decl.location)
        for f in decl.fields:
            if not introduce_field_pl(self.pl, self.context, qt, f.name):
                diagnostics.append(self.diagnostic(
                    'duplicate-field', f'field {decl.name}.{f.name} may already be introduced', decl.location))
        for method in decl.methods:
            diagnostics += self.method(method, qt)
        return diagnostics


def typecheck_term_pl(pl, env, term, phi, warnings=None, normalize=True):
    """The possible types of ``term`` in every variant containing ``phi``."""
    return _Checker(pl, phi, warnings, normalize).term(env, term)


def typecheck_declaration_pl(pl, decl, normalize=True):
    logger.debug('checking %s.%s', decl.feature, decl.name)
    checker = _Checker(pl, decl.feature, [], normalize)
    return checker.declaration(decl) + checker.warnings


def typecheck_product_line(pl, normalize=True):
    """Every diagnostic of the product line; no error diagnostics means well-typed.

    Declarations of features that occur in no valid variant are skipped.
    """
    analysis = pl.analysis
    diagnostics = []
    if analysis.satisfiable(Atom(pl.main_context)):
        try:
            typecheck_term_pl(pl, {}, pl.main_term, pl.main_context, diagnostics, normalize)
        except TypeCheckError as exc:
            diagnostics += exc.diagnostics
    else:
        logger.info('main term skipped: feature %s is dead', pl.main_context)
    for decl in pl.class_table.values():
        if not analysis.satisfiable(Atom(decl.feature)):
            logger.info('skipping %s.%s: feature %s is dead', decl.feature, decl.name, decl.feature)
            continue
        diagnostics += typecheck_declaration_pl(pl, decl, normalize)
    return sort_diagnostics(diagnostics)
