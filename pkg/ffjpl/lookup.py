"""Refinement-chain navigation and member lookup for single FFJ programs."""
from typing import NamedTuple, Tuple

from .errors import FeatureNotInChain, MethodNotFound, SanityViolation, UnknownClass
from .syntax import OBJECT, ClassDecl, Term
from .tables import BASE_OBJECT, QualifiedType


class MethodBody(NamedTuple):
    params: Tuple[str, ...]
    body: Term
    owner: QualifiedType


def last(rt, class_name):
    if class_name == OBJECT:
        return BASE_OBJECT
    chain = rt.chain(class_name)
    return QualifiedType(chain[-1], class_name)


def pred(rt, qt):
    chain = rt.chain(qt.class_name)
    if qt.feature not in chain:
        raise FeatureNotInChain(f'{qt.feature} does not declare {qt.class_name}')
    i = chain.index(qt.feature)
    return QualifiedType(chain[i - 1], qt.class_name) if i else BASE_OBJECT


def ancestor(ct, rt, qt):
    """Where lookup continues after ``qt``'s own declaration.

    A class declaration continues with its superclass, a refinement with its
    predecessor in the chain.
    """
    decl = ct.declaration(qt)
    if isinstance(decl, ClassDecl):
        return last(rt, decl.superclass)
    return pred(rt, qt)


def superclass(ct, class_name):
    introductions = ct.introductions(class_name)
    if not introductions:
        raise UnknownClass(class_name)
    return introductions[0].superclass


def subtype(ct, c, d):
    """Reflexive-transitive closure of `extends`. A class that is only refined has no supertypes."""
    seen = set()
    while c != d:
        if c == OBJECT or c in seen or not ct.introductions(c):
            return False
        seen.add(c)
        c = superclass(ct, c)
    return True


def fields(ct, rt, qt):
    """Fields of the combined hierarchy: superclass first, then own, then refinements."""
    if qt == BASE_OBJECT:
        return ()
    decl = ct.declaration(qt)
    return fields(ct, rt, ancestor(ct, rt, qt)) + decl.fields


def _find_method(ct, rt, m, start):
    seen = set()
    qt = start
    while qt != BASE_OBJECT:
        if qt in seen:
            raise SanityViolation('inheritance-cycle', f'lookup of {m} revisits {qt}')
        seen.add(qt)
        method = ct.declaration(qt).method(m)
        if method is not None:
            return method, qt
        qt = ancestor(ct, rt, qt)
    raise MethodNotFound(m, start)


def mbody(ct, rt, m, qt):
    method, owner = _find_method(ct, rt, m, qt)
    return MethodBody(method.param_names, method.body, owner)


def mtype(ct, rt, m, qt):
    method, _ = _find_method(ct, rt, m, qt)
    return method.signature


def introduce_class(ct, rt, qt):
    return all(decl.feature == qt.feature for decl in ct.introductions(qt.class_name))


def introduce_field(ct, rt, qt, field):
    return all(f.name != field for f in fields(ct, rt, ancestor(ct, rt, qt)))


def introduce_method(ct, rt, qt, m):
    try:
        mtype(ct, rt, m, ancestor(ct, rt, qt))
    except MethodNotFound:
        return True
    return False


def refine(ct, rt, qt):
    preceding = rt.preceding(qt)
    return any(isinstance(ct[QualifiedType(f, qt.class_name)], ClassDecl) for f in preceding)


def override(ct, rt, m, qt, signature):
    try:
        return mtype(ct, rt, m, ancestor(ct, rt, qt)) == signature
    except MethodNotFound:
        return False
