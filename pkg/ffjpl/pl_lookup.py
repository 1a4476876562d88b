"""Variability-aware lookups over a whole product line.

Every function takes a feature context: the features known to be present
where the lookup happens. Answers hold for all variants containing it.
"""
import dataclasses

from .featuremodel import AlwaysAlone, AlwaysInGroup
from .lookup import ancestor, last, pred
from .syntax import OBJECT, ClassDecl
from .tables import BASE_OBJECT, MethodRef, QualifiedType


@dataclasses.dataclass(frozen=True)
class FieldEntry:
    class_name: str
    name: str
    optional: bool
    origin: QualifiedType

    def __str__(self):
        return f'{self.class_name} {self.name}' + ('@' if self.optional else '')


def render_alternatives(alternatives):
    return ' || '.join(', '.join(str(e) for e in inner) for inner in alternatives)


def extend(context, feature):
    return tuple(sorted(set(context) | {feature}))


def subtype_pl(pl, context, c, e, _visited=frozenset()):
    if c == e:
        return True
    if c == OBJECT or (c, tuple(context)) in _visited:
        return False
    analysis, it = pl.analysis, pl.introduction_table
    if not analysis.reachable(it, context, c):
        return False
    visited = _visited | {(c, tuple(context))}
    found = False
    for feature in it.of_class(c):
        if not analysis.sometimes(context, feature):
            continue
        found = True
        grown = extend(context, feature)
        superclass = it.superclasses[QualifiedType(feature, c)]
        if not analysis.reachable(it, grown, superclass):
            return False
        if not subtype_pl(pl, grown, superclass, e, visited):
            return False
    return found


def _candidates(pl, qt):
    return tuple(f for f in pl.refinement_table.chain(qt.class_name) if f != qt.feature)


def _entries(decl, qt, optional):
    return tuple(FieldEntry(f.class_name, f.name, optional, qt) for f in decl.fields)


def _marked(alternatives):
    return tuple(tuple(dataclasses.replace(e, optional=True) for e in inner) for inner in alternatives)


def fields_pl(pl, context, qt, _path=frozenset()):
    """Field lists of every alternative hierarchy path, superclass fields first."""
    if qt == BASE_OBJECT or qt in _path:
        return ((),)
    path = _path | {qt}
    analysis, ct, rt = pl.analysis, pl.class_table, pl.refinement_table
    decl = ct.declaration(qt)
    if analysis.never(context, qt.feature):
        return fields_pl(pl, context, pred(rt, qt), path)
    verdict = analysis.always(context, qt.feature, _candidates(pl, qt))
    if isinstance(verdict, AlwaysInGroup):
        forks = ()
        for member in verdict.features:
            forks += fields_pl(pl, extend(context, member), qt, _path)
        return forks
    if isinstance(verdict, AlwaysAlone):
        inherited = fields_pl(pl, context, ancestor(ct, rt, qt), path)
        own = _entries(decl, qt, False)
        return tuple(inner + own for inner in inherited)
    # optional: present in some variants of the context only
    inherited = fields_pl(pl, context, ancestor(ct, rt, qt), path)
    if isinstance(decl, ClassDecl):
        inherited = _marked(inherited)
    own = _entries(decl, qt, True)
    return tuple(inner + own for inner in inherited)


def mtype_pl(pl, context, m, qt, _path=frozenset()):
    """Every signature of ``m`` that may be in effect at ``qt``; duplicates kept."""
    if qt == BASE_OBJECT or qt in _path:
        return []
    path = _path | {qt}
    analysis, ct, rt = pl.analysis, pl.class_table, pl.refinement_table
    decl = ct.declaration(qt)
    present = analysis.sometimes(context, qt.feature)
    method = decl.method(m) if present else None
    signatures = [method.signature] if method is not None else []
    signatures += mtype_pl(pl, context, m, pred(rt, qt), path)
    if isinstance(decl, ClassDecl) and present:
        signatures += mtype_pl(pl, context, m, last(rt, decl.superclass), path)
    return signatures


def introduce_class_pl(pl, context, qt):
    analysis = pl.analysis
    return not any(analysis.sometimes(context, f)
                   for f in pl.introduction_table.of_class(qt.class_name) if f != qt.feature)


def introduce_field_pl(pl, context, qt, field):
    alternatives = fields_pl(pl, context, ancestor(pl.class_table, pl.refinement_table, qt))
    return all(e.name != field for inner in alternatives for e in inner)


def introduce_method_pl(pl, context, qt, m):
    return not mtype_pl(pl, context, m, ancestor(pl.class_table, pl.refinement_table, qt))


def refine_pl(pl, context, qt):
    scope = pl.refinement_table.preceding(qt)
    return pl.analysis.reachable(pl.introduction_table, context, qt.class_name, scope)


def override_pl(pl, context, m, qt, signature):
    ct, rt = pl.class_table, pl.refinement_table
    signatures = mtype_pl(pl, context, m, ancestor(ct, rt, qt))
    if not signatures or any(s != signature for s in signatures):
        return False
    decl = ct.declaration(qt)
    if isinstance(decl, ClassDecl):
        return pl.analysis.reachable(pl.introduction_table, context, MethodRef(decl.superclass, m))
    return pl.analysis.reachable(pl.introduction_table, context, MethodRef(qt.class_name, m), rt.preceding(qt))
