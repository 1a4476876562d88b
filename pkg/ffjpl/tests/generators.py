"""Hypothesis strategies for random product lines and FFJ programs.

Generated product lines are well-typed by construction: every declaration
only uses classes and members contributed by the features its own feature
implies. Method bodies only call methods created before them, so every
evaluation terminates. A class may be introduced a second time by a
feature that excludes its first introducer, optionally with a constraint
requiring one of the two. A fault may be injected afterwards; it lives in
features of its own so the rest of the product line stays intact.
"""
import dataclasses
import math
from typing import List, NamedTuple, Optional, Tuple

from hypothesis import strategies as st

from ffjpl.derivation import derive, enumerate_valid_selections
from ffjpl.featuremodel import FeatureModel
from ffjpl.parser import SourceUnit, parse_unit
from ffjpl.syntax import (
    FALSE, MAIN_FILE, OBJECT, THIS, TRUE, And, Atom, Cast, ClassDecl, FieldAccess, FieldDecl, Implies, Invoke,
    MethodDecl, New, Not, Or, Param, RefinementDecl, Var, render_declaration, render_term,
)
from ffjpl.tables import assemble_product_line

MAX_FEATURES = 7
MAX_CLASSES = 8

FAULTS = ('duplicate-field', 'occluding-method', 'refinement-target', 'unreachable-method')

# what a derived variant reports for each fault
VARIANT_CODES = {
    'duplicate-field': 'duplicate-field',
    'occluding-method': 'occluding-method',
    'refinement-target': 'refinement-target',
    'unreachable-method': 'unknown-method',
}


@dataclasses.dataclass
class _Field:
    name: str
    class_name: str
    feature: str


@dataclasses.dataclass
class _Method:
    index: int
    name: str
    params: Tuple[Param, ...]
    return_type: str
    feature: str
    owner: str


@dataclasses.dataclass
class _Decl:
    feature: str
    name: str
    superclass: Optional[str] = None
    fields: List[FieldDecl] = dataclasses.field(default_factory=list)
    methods: List[MethodDecl] = dataclasses.field(default_factory=list)

    def build(self):
        if self.superclass is None:
            return RefinementDecl(self.name, tuple(self.fields), tuple(self.methods), self.feature)
        return ClassDecl(self.name, self.superclass, tuple(self.fields), tuple(self.methods), self.feature)


class _Draft:

    def __init__(self):
        self.features = []
        self.parents = {}
        self.exclusions = []
        self.groups = []
        self.alternates = set()
        self.mandatory_root = True
        self.decls = {}
        self.introducers = {}
        self.superclasses = {}
        self.fields = {}
        self.methods = {}
        self.counter = 0

    def fresh(self, prefix):
        self.counter += 1
        return f'{prefix}{self.counter}'

    def add_feature(self, feature, parent):
        self.features.append(feature)
        self.parents[feature] = parent

    def ancestors(self, feature):
        found = set()
        while feature is not None:
            found.add(feature)
            feature = self.parents[feature]
        return found

    def alive(self, feature):
        anc = self.ancestors(feature)
        return not any(a in anc and b in anc for a, b in self.exclusions)

    def classes(self, anc):
        return [c for c, f in self.introducers.items() if f in anc]

    def hierarchy(self, class_name):
        chain = []
        while class_name != OBJECT:
            chain.append(class_name)
            class_name = self.superclasses[class_name]
        return chain

    def subclass(self, c, d):
        return d == OBJECT or d in self.hierarchy(c)

    def supertypes(self, class_name):
        return self.hierarchy(class_name) + [OBJECT]

    def fields_of(self, class_name, anc):
        return [f for c in self.hierarchy(class_name) for f in self.fields.get(c, []) if f.feature in anc]

    def methods_of(self, class_name, anc, limit):
        return [m for c in self.hierarchy(class_name) for m in self.methods.get(c, [])
                if m.feature in anc and m.index < limit]

    def constructor(self, class_name, anc):
        """Field types of ``new C(...)`` if every field of C is guaranteed under ``anc``."""
        types = []
        for c in reversed(self.hierarchy(class_name)):
            declared = sorted(self.fields.get(c, []), key=lambda f: self.features.index(f.feature))
            if any(f.feature not in anc for f in declared):
                return None
            types += [f.class_name for f in declared]
        return types

    def declare(self, feature, name, superclass=None):
        decl = _Decl(feature, name, superclass)
        self.decls[(feature, name)] = decl
        if superclass is not None:
            self.introducers[name] = feature
            self.superclasses[name] = superclass
        return decl

    def add_field(self, decl, class_name):
        name = self.fresh('f')
        decl.fields.append(FieldDecl(class_name, name))
        self.fields.setdefault(decl.name, []).append(_Field(name, class_name, decl.feature))

    def feature_model(self):
        constraints = []
        if self.mandatory_root:
            constraints.append(Atom(self.features[0]))
        for feature in self.features[1:]:
            constraints.append(Implies(Atom(feature), Atom(self.parents[feature])))
        for a, b in self.exclusions:
            constraints.append(Implies(Atom(a), Not(Atom(b))))
        for parent, a, b in self.groups:
            constraints.append(Implies(Atom(parent), Or(Atom(a), Atom(b))))
        return FeatureModel(tuple(self.features), tuple(constraints))

    def units(self, main):
        units = []
        for feature in self.features:
            decls = [d.build() for (f, _), d in self.decls.items() if f == feature]
            if decls:
                filename = f'{feature}/{feature}.ffj'
                source = '\n\n'.join(render_declaration(d) for d in decls) + '\n'
                units.append(parse_unit(source, feature, filename))
        feature, term = main
        units.append(parse_unit(render_term(term) + '\n', feature, f'{feature}/{MAIN_FILE}', allow_term=True))
        return tuple(units)


def _options(draft, anc, env, target, depth, limit):
    options = [('var', name) for name, c in env.items() if draft.subclass(c, target)]
    if depth <= 0:
        return options
    known = [OBJECT] + draft.classes(anc)
    for c in known:
        if draft.subclass(c, target) and draft.constructor(c, anc) is not None:
            options.append(('new', c))
    for c in known:
        for f in draft.fields_of(c, anc):
            if draft.subclass(f.class_name, target):
                options.append(('field', c, f.name))
        for m in draft.methods_of(c, anc, limit):
            if draft.subclass(m.return_type, target):
                options.append(('invoke', c, m))
    options.append(('upcast',))
    for c in known:
        if c != target and draft.subclass(c, target):
            options.append(('downcast', c))
    return options


def _term(draw, draft, anc, env, target, depth, limit):
    """A term whose type is a subclass of ``target``, or None."""
    options = _options(draft, anc, env, target, depth, limit)
    if not options:
        return None
    start = draw(st.integers(0, len(options) - 1))
    for option in (options[start:] + options[:start])[:3]:
        term = _build(draw, draft, anc, env, target, depth, limit, option)
        if term is not None:
            return term
    return next((Var(o[1]) for o in options if o[0] == 'var'), None)


def _build(draw, draft, anc, env, target, depth, limit, option):
    kind = option[0]
    if kind == 'var':
        return Var(option[1])
    if kind == 'new':
        args = []
        for class_name in draft.constructor(option[1], anc):
            arg = _term(draw, draft, anc, env, class_name, depth - 1, limit)
            if arg is None:
                return None
            args.append(arg)
        return New(option[1], tuple(args))
    if kind == 'field':
        receiver = _term(draw, draft, anc, env, option[1], depth - 1, limit)
        return None if receiver is None else FieldAccess(receiver, option[2])
    if kind == 'invoke':
        method = option[2]
        receiver = _term(draw, draft, anc, env, option[1], depth - 1, limit)
        if receiver is None:
            return None
        args = []
        for p in method.params:
            arg = _term(draw, draft, anc, env, p.class_name, depth - 1, limit)
            if arg is None:
                return None
            args.append(arg)
        return Invoke(receiver, method.name, tuple(args))
    operand = _term(draw, draft, anc, env, target, depth - 1, limit)
    if operand is None:
        return None
    return Cast(target if kind == 'upcast' else option[1], operand)


def _new_method(draw, draft, decl):
    anc = draft.ancestors(decl.feature)
    known = [OBJECT] + draft.classes(anc)
    count = draw(st.integers(0, 2))
    params = tuple(Param(draw(st.sampled_from(known)), f'x{i}') for i in range(count))
    env = {THIS: decl.name}
    env.update((p.name, p.class_name) for p in params)
    returns = list(dict.fromkeys(t for c in env.values() for t in draft.supertypes(c)))
    return_type = draw(st.sampled_from(returns))
    index = draft.counter + 1
    name = draft.fresh('m')
    body = _term(draw, draft, anc, env, return_type, 2, index)
    decl.methods.append(MethodDecl(return_type, name, params, body))
    draft.methods.setdefault(decl.name, []).append(_Method(index, name, params, return_type, decl.feature, decl.name))


def _override(draw, draft, decl, taken):
    anc = draft.ancestors(decl.feature) - {decl.feature}
    candidates = [m for m in draft.methods.get(decl.name, []) if m.feature in anc and m.name not in taken]
    if not candidates:
        return
    method = draw(st.sampled_from(candidates))
    taken.add(method.name)
    env = {THIS: decl.name}
    env.update((p.name, p.class_name) for p in method.params)
    body = _term(draw, draft, draft.ancestors(decl.feature), env, method.return_type, 2, method.index)
    decl.methods.append(MethodDecl(method.return_type, method.name, method.params, body, overrides=True))


class _Alternative(NamedTuple):
    class_name: str
    first: str
    feature: str
    parent: str
    grouped: bool
    shared: FieldDecl


def _alternative(draw, draft):
    """Introduce an existing class again in a new feature that excludes its first introducer.

    The new declaration has its own superclass, fields and methods. Both
    declarations share one field; when the parent feature requires one of the
    two introducers, a class of the parent uses that field.
    """
    candidates = [c for c, f in draft.introducers.items() if draft.parents[f] is not None]
    if not candidates:
        return None
    class_name = draw(st.sampled_from(candidates))
    first = draft.introducers[class_name]
    parent = draft.parents[first]
    feature = draft.fresh('Alt')
    draft.add_feature(feature, parent)
    draft.exclusions.append((feature, first))
    grouped = draw(st.booleans())
    if grouped:
        draft.groups.append((parent, first, feature))
    known = [OBJECT] + draft.classes(draft.ancestors(parent))
    decl = _Decl(feature, class_name, draw(st.sampled_from(known)))
    draft.decls[(feature, class_name)] = decl
    draft.alternates.add((feature, class_name))
    draft.add_field(draft.decls[(first, class_name)], draw(st.sampled_from(known)))
    shared = draft.decls[(first, class_name)].fields[-1]
    decl.fields.append(shared)
    for _ in range(draw(st.integers(0, 2))):
        decl.fields.append(FieldDecl(draw(st.sampled_from(known)), draft.fresh('f')))
    return _Alternative(class_name, first, feature, parent, grouped, shared)


def _finish_alternative(draw, draft, alt):
    decl = draft.decls[(alt.feature, alt.class_name)]
    anc = draft.ancestors(alt.feature)
    known = [OBJECT] + draft.classes(anc)
    for _ in range(draw(st.integers(0, 2))):
        param = draw(st.sampled_from(known))
        return_type = draw(st.sampled_from(draft.supertypes(param)))
        index = draft.counter + 1
        body = _term(draw, draft, anc, {'x0': param}, return_type, 2, index)
        decl.methods.append(MethodDecl(return_type, draft.fresh('m'), (Param(param, 'x0'),), body))
    common = draft.fresh('m')
    for feature in (alt.first, alt.feature):
        draft.decls[(feature, alt.class_name)].methods.append(MethodDecl(OBJECT, common, (), New(OBJECT)))
    if alt.grouped:
        user = draft.declare(alt.parent, draft.fresh('User'), OBJECT)
        x = Param(alt.class_name, 'x0')
        user.methods.append(MethodDecl(alt.shared.class_name, draft.fresh('m'), (x,),
                                       FieldAccess(Var('x0'), alt.shared.name)))
        user.methods.append(MethodDecl(OBJECT, draft.fresh('m'), (x,), Invoke(Var('x0'), common)))


def _fault_feature(draft, name, parent):
    draft.add_feature(name, parent)
    return name


def _inject(draw, draft, fault):
    """Add ``fault`` in new features; returns the fault, or None if nothing qualifies."""
    live = [c for c, f in draft.introducers.items() if draft.alive(f)]
    if fault == 'duplicate-field':
        candidates = [(c, f) for c in live for f in draft.fields_of(c, draft.ancestors(draft.introducers[c]))]
        if not candidates:
            return None
        c, f = draw(st.sampled_from(candidates))
        feature = _fault_feature(draft, 'Fault', draft.introducers[c])
        draft.declare(feature, c).fields.append(FieldDecl(f.class_name, f.name))
        return fault
    if fault == 'occluding-method':
        candidates = [(c, m) for c in live
                      for m in draft.methods_of(c, draft.ancestors(draft.introducers[c]), math.inf)]
        if not candidates:
            return None
        c, m = draw(st.sampled_from(candidates))
        feature = _fault_feature(draft, 'Fault', draft.introducers[c])
        env = {THIS: c}
        env.update((p.name, p.class_name) for p in m.params)
        body = _term(draw, draft, draft.ancestors(feature), env, m.return_type, 1, m.index)
        draft.declare(feature, c).methods.append(MethodDecl(m.return_type, m.name, m.params, body))
        return fault
    if fault == 'refinement-target':
        root = draft.features[0]
        doubled = {c for _, c in draft.alternates}
        candidates = [c for c, f in draft.introducers.items() if f != root and c not in doubled]
        if not candidates:
            return None
        c = draw(st.sampled_from(candidates))
        feature = _fault_feature(draft, 'Fault', root)
        draft.declare(feature, c).methods.append(MethodDecl(OBJECT, draft.fresh('m'), (), New(OBJECT)))
        return fault
    if not live:
        return None
    c = draw(st.sampled_from(live))
    parent = draft.introducers[c]
    name = draft.fresh('m')
    draft.declare(_fault_feature(draft, 'FaultA', parent), c).methods.append(MethodDecl(OBJECT, name, (), New(OBJECT)))
    caller = draft.declare(_fault_feature(draft, 'FaultB', parent), draft.fresh('Caller'), OBJECT)
    caller.methods.append(MethodDecl(OBJECT, draft.fresh('m'), (Param(c, 'x0'),), Invoke(Var('x0'), name)))
    return fault


class GeneratedProductLine(NamedTuple):
    feature_model: FeatureModel
    units: Tuple[SourceUnit, ...]
    fault: Optional[str]

    def build(self, cache=None):
        return assemble_product_line(self.units, self.feature_model, cache)


@st.composite
def product_lines(draw, faults=True, alternatives=True):
    draft = _Draft()
    fault = draw(st.sampled_from((None,) + FAULTS)) if faults else None
    spare = (2 if fault == 'unreachable-method' else 1) + (1 if alternatives else 0)
    count = draw(st.integers(1, MAX_FEATURES - spare))
    for i in range(count):
        draft.add_feature(f'F{i}', None if i == 0 else f'F{draw(st.integers(0, i - 1))}')
    draft.mandatory_root = draw(st.booleans())
    for i, a in enumerate(draft.features):
        for b in draft.features[:i]:
            if b not in draft.ancestors(a) and draw(st.integers(0, 3)) == 0:
                draft.exclusions.append((a, b))

    for _ in range(draw(st.integers(1, MAX_CLASSES - spare))):
        feature = draw(st.sampled_from(draft.features))
        superclass = draw(st.sampled_from([OBJECT] + draft.classes(draft.ancestors(feature))))
        draft.declare(feature, draft.fresh('C'), superclass)
    for class_name, introducer in list(draft.introducers.items()):
        for feature in draft.features:
            if feature != introducer and introducer in draft.ancestors(feature) and draw(st.booleans()):
                draft.declare(feature, class_name)

    alternative = _alternative(draw, draft) if alternatives and draw(st.booleans()) else None

    ordered = sorted((d for key, d in draft.decls.items() if key not in draft.alternates),
                     key=lambda d: draft.features.index(d.feature))
    for decl in ordered:
        known = [OBJECT] + draft.classes(draft.ancestors(decl.feature))
        for _ in range(draw(st.integers(0, 2))):
            draft.add_field(decl, draw(st.sampled_from(known)))
    for decl in ordered:
        taken = set()
        if decl.superclass is None and draw(st.booleans()):
            _override(draw, draft, decl, taken)
        for _ in range(draw(st.integers(0, 2))):
            _new_method(draw, draft, decl)

    if alternative is not None:
        _finish_alternative(draw, draft, alternative)

    main_feature = draw(st.sampled_from(draft.features))
    anc = draft.ancestors(main_feature)
    target = draw(st.sampled_from([OBJECT] + draft.classes(anc)))
    main = _term(draw, draft, anc, {}, target, 3, math.inf) or New(OBJECT)

    if fault is not None:
        fault = _inject(draw, draft, fault)
    return GeneratedProductLine(draft.feature_model(), draft.units((main_feature, main)), fault)


@st.composite
def programs(draw):
    """Well-typed FFJ programs: a variant of a fault-free generated product line."""
    pl = draw(product_lines(faults=False)).build()
    selections = enumerate_valid_selections(pl.feature_model).selections
    with_main = [s for s in selections if pl.main_context in s]
    return derive(pl, draw(st.sampled_from(with_main or list(selections))))


def formulas(names, constants=True, max_leaves=12):
    """Propositional formulas over ``names``."""
    leaves = st.sampled_from(names).map(Atom)
    if constants:
        leaves = leaves | st.sampled_from([TRUE, FALSE])
    return st.recursive(leaves, lambda sub: st.one_of(
        sub.map(Not),
        st.tuples(sub, sub).map(lambda p: And(*p)),
        st.tuples(sub, sub).map(lambda p: Or(*p)),
        st.tuples(sub, sub).map(lambda p: Implies(*p)),
    ), max_leaves=max_leaves)
