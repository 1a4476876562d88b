"""Type checking of single FFJ programs."""
import logging

from .errors import Diagnostic, MethodNotFound, Severity, TypeCheckError, sort_diagnostics
from .lookup import (
    ancestor, fields, introduce_class, introduce_field, introduce_method, last, mtype, override, refine,
    subtype,
)
from .syntax import OBJECT, THIS, Cast, ClassDecl, FieldAccess, Invoke, New, Var
from .tables import QualifiedType

logger = logging.getLogger(__name__)


def _fail(code, message, location):
    raise TypeCheckError([Diagnostic(code, message, location)])


def _known(rt, class_name):
    return class_name == OBJECT or class_name in rt


def typecheck_term(ct, rt, env, term, warnings=None):
    """The class of ``term`` under ``env``; raises TypeCheckError.

    Stupid casts are appended to ``warnings`` when a list is given.
    """
    if isinstance(term, Var):
        if term.name not in env:
            _fail('unknown-variable', f"unknown variable '{term.name}'", term.location)
        return env[term.name]

    if isinstance(term, FieldAccess):
        receiver = typecheck_term(ct, rt, env, term.receiver, warnings)
        declared = fields(ct, rt, last(rt, receiver))
        for f in declared:
            if f.name == term.field:
                return f.class_name
        _fail('unknown-field', f"class {receiver} has no field '{term.field}'", term.location)

    if isinstance(term, Invoke):
        receiver = typecheck_term(ct, rt, env, term.receiver, warnings)
        try:
            signature = mtype(ct, rt, term.method, last(rt, receiver))
        except MethodNotFound:
            _fail('unknown-method', f"class {receiver} has no method '{term.method}'", term.location)
        args = [typecheck_term(ct, rt, env, a, warnings) for a in term.args]
        if len(args) != len(signature.param_types):
            _fail('arity-mismatch', f'{receiver}.{term.method} expects {len(signature.param_types)} '
                  f'argument(s), got {len(args)}', term.location)
        for i, (actual, expected) in enumerate(zip(args, signature.param_types)):
            if not subtype(ct, actual, expected):
                _fail('argument-type', f'argument {i + 1} of {receiver}.{term.method}: {actual} is not a '
                      f'subtype of {expected}', term.args[i].location)
        return signature.return_type

    if isinstance(term, New):
        if not _known(rt, term.class_name):
            _fail('unknown-class', f"unknown class '{term.class_name}'", term.location)
        args = [typecheck_term(ct, rt, env, a, warnings) for a in term.args]
        declared = fields(ct, rt, last(rt, term.class_name))
        if len(args) != len(declared):
            _fail('arity-mismatch', f'new {term.class_name} expects {len(declared)} argument(s), got '
                  f'{len(args)}', term.location)
        for i, (actual, f) in enumerate(zip(args, declared)):
            if not subtype(ct, actual, f.class_name):
                _fail('argument-type', f'field {f.name} of {term.class_name}: {actual} is not a subtype of '
                      f'{f.class_name}', term.args[i].location)
        return term.class_name

    if isinstance(term, Cast):
        operand = typecheck_term(ct, rt, env, term.operand, warnings)
        if not _known(rt, term.target):
            _fail('unknown-class', f"unknown class '{term.target}'", term.location)
        if not subtype(ct, operand, term.target) and not subtype(ct, term.target, operand):
            if warnings is not None:
                warnings.append(Diagnostic('stupid-cast', f'cast of {operand} to unrelated {term.target}',
                                           term.location, Severity.STUPID_WARNING))
        return term.target

    raise TypeError(f'not a term: {term!r}')


def typecheck_method(ct, rt, method, qt):
    diagnostics = []
    env = {p.name: p.class_name for p in method.params}
    env[THIS] = qt.class_name
    try:
        body = typecheck_term(ct, rt, env, method.body, diagnostics)
        if not subtype(ct, body, method.return_type):
            diagnostics.append(Diagnostic('return-type', f'{qt}.{method.name} returns {body}, not a subtype of '
                                          f'{method.return_type}', method.location))
    except TypeCheckError as exc:
        diagnostics.extend(exc.diagnostics)
    if method.overrides:
        if not override(ct, rt, method.name, qt, method.signature):
            diagnostics.append(Diagnostic('invalid-override', f'{qt}.{method.name} overrides no method with '
                                          f'signature {method.signature}', method.location))
    elif not introduce_method(ct, rt, qt, method.name):
        inherited = mtype(ct, rt, method.name, ancestor(ct, rt, qt))
        diagnostics.append(Diagnostic('occluding-method', f'{qt}.{method.name} occludes an existing method '
                                      f'with signature {inherited}', method.location))
    return diagnostics


def typecheck_declaration(ct, rt, decl):
    qt = QualifiedType(decl.feature, decl.name)
    logger.debug('checking %s', qt)
    diagnostics = []
    if isinstance(decl, ClassDecl):
        if not introduce_class(ct, rt, qt):
            diagnostics.append(Diagnostic('duplicate-class', f'class {decl.name} is introduced by more than '
                                          f'one feature', decl.location))
    elif not refine(ct, rt, qt):
        diagnostics.append(Diagnostic('refinement-target', f'{qt} refines a class that no preceding feature '
                                      f'introduces', decl.location))
    for f in decl.fields:
        if not introduce_field(ct, rt, qt, f.name):
            diagnostics.append(Diagnostic('duplicate-field', f'field {decl.name}.{f.name} is already '
                                          f'introduced', decl.location))
    for method in decl.methods:
        diagnostics += typecheck_method(ct, rt, method, qt)
    return diagnostics


def typecheck_program(program):
    """All diagnostics of an FFJ program; no error diagnostics means well-typed.

    Programs with table violations report only those.
    """
    if program.violations:
        return program.diagnostics
    ct, rt = program.class_table, program.refinement_table
    diagnostics = []
    try:
        typecheck_term(ct, rt, {}, program.main_term, diagnostics)
    except TypeCheckError as exc:
        diagnostics.extend(exc.diagnostics)
    for decl in ct.values():
        diagnostics += typecheck_declaration(ct, rt, decl)
    return sort_diagnostics(diagnostics)
