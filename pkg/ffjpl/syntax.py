"""Abstract syntax of FFJ programs and feature-model formulas.

Every node carries a :class:`SourceLocation`. Locations never take part in
equality, so a reparsed pretty-print compares equal to the original.
"""
import dataclasses
from typing import NamedTuple, Tuple, Union

BASE = 'Base'
OBJECT = 'Object'
THIS = 'this'
MAIN_FILE = 'main.ffj'

KEYWORDS = frozenset(['class', 'extends', 'refines', 'overrides', 'return', 'new'])
MODEL_KEYWORDS = frozenset(['features', 'model', 'implies', 'or', 'and', 'not'])


@dataclasses.dataclass(frozen=True, order=True)
class SourceLocation:
    file: str = '<string>'
    line: int = 0
    column: int = 0

    def __str__(self):
        return f'{self.file}:{self.line}:{self.column}'


NOWHERE = SourceLocation()


def _located():
    return dataclasses.field(default=NOWHERE, compare=False, repr=False)


class Term:
    __slots__ = ()

    def __str__(self):
        return render_term(self)


@dataclasses.dataclass(frozen=True)
class Var(Term):
    name: str
    location: SourceLocation = _located()


@dataclasses.dataclass(frozen=True)
class FieldAccess(Term):
    receiver: Term
    field: str
    location: SourceLocation = _located()


@dataclasses.dataclass(frozen=True)
class Invoke(Term):
    receiver: Term
    method: str
    args: Tuple[Term, ...] = ()
    location: SourceLocation = _located()


@dataclasses.dataclass(frozen=True)
class New(Term):
    class_name: str
    args: Tuple[Term, ...] = ()
    location: SourceLocation = _located()


@dataclasses.dataclass(frozen=True)
class Cast(Term):
    target: str
    operand: Term
    location: SourceLocation = _located()


def is_value(term):
    return isinstance(term, New) and all(is_value(arg) for arg in term.args)


def children(term):
    """Immediate subterms, left to right."""
    if isinstance(term, FieldAccess):
        return (term.receiver,)
    if isinstance(term, Cast):
        return (term.operand,)
    if isinstance(term, Invoke):
        return (term.receiver,) + tuple(term.args)
    if isinstance(term, New):
        return tuple(term.args)
    return ()


def subterms(term):
    """Pre-order walk over a term."""
    stack = [term]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def term_depth(term):
    """Height of ``term`` and the location of its deepest node, computed without recursion."""
    deepest, where = 0, term.location
    stack = [(term, 1)]
    while stack:
        node, depth = stack.pop()
        if depth > deepest:
            deepest, where = depth, node.location
        stack.extend((child, depth + 1) for child in children(node))
    return deepest, where


def formula_depth(formula):
    """Height of a formula, computed without recursion."""
    deepest = 0
    stack = [(formula, 1)]
    while stack:
        node, depth = stack.pop()
        deepest = max(deepest, depth)
        if isinstance(node, Not):
            stack.append((node.operand, depth + 1))
        elif isinstance(node, _Binary):
            stack += [(node.left, depth + 1), (node.right, depth + 1)]
    return deepest


class FieldDecl(NamedTuple):
    class_name: str
    name: str

    def __str__(self):
        return f'{self.class_name} {self.name}'


class Param(NamedTuple):
    class_name: str
    name: str

    def __str__(self):
        return f'{self.class_name} {self.name}'


class MethodSignature(NamedTuple):
    param_types: Tuple[str, ...]
    return_type: str

    def __str__(self):
        return '(' + ', '.join(self.param_types) + f') -> {self.return_type}'


@dataclasses.dataclass(frozen=True)
class MethodDecl:
    return_type: str
    name: str
    params: Tuple[Param, ...]
    body: Term
    overrides: bool = False
    location: SourceLocation = _located()

    @property
    def param_names(self):
        return tuple(p.name for p in self.params)

    @property
    def signature(self):
        return MethodSignature(tuple(p.class_name for p in self.params), self.return_type)

    def __str__(self):
        return render_method(self)


@dataclasses.dataclass(frozen=True)
class ClassDecl:
    name: str
    superclass: str
    fields: Tuple[FieldDecl, ...] = ()
    methods: Tuple[MethodDecl, ...] = ()
    feature: str = ''
    location: SourceLocation = _located()

    def method(self, name):
        return next((m for m in self.methods if m.name == name), None)

    def __str__(self):
        return render_declaration(self)


@dataclasses.dataclass(frozen=True)
class RefinementDecl:
    name: str
    fields: Tuple[FieldDecl, ...] = ()
    methods: Tuple[MethodDecl, ...] = ()
    feature: str = ''
    location: SourceLocation = _located()

    def method(self, name):
        return next((m for m in self.methods if m.name == name), None)

    def __str__(self):
        return render_declaration(self)


Declaration = Union[ClassDecl, RefinementDecl]


def referenced_classes(decl):
    """Yield (class name, location) for every class name a declaration mentions."""
    if isinstance(decl, ClassDecl):
        yield decl.superclass, decl.location
    for f in decl.fields:
        yield f.class_name, decl.location
    for method in decl.methods:
        yield method.return_type, method.location
        for p in method.params:
            yield p.class_name, method.location
        for term in subterms(method.body):
            if isinstance(term, New):
                yield term.class_name, term.location
            elif isinstance(term, Cast):
                yield term.target, term.location


# Feature-model formulas.

class Formula:
    __slots__ = ()

    def __str__(self):
        return render_formula(self)


@dataclasses.dataclass(frozen=True)
class Atom(Formula):
    feature: str
    location: SourceLocation = _located()

    def evaluate(self, assignment):
        return bool(assignment.get(self.feature, False))

    def atoms(self):
        return {self.feature}


@dataclasses.dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def evaluate(self, assignment):
        return not self.operand.evaluate(assignment)

    def atoms(self):
        return self.operand.atoms()


@dataclasses.dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def atoms(self):
        return self.left.atoms() | self.right.atoms()


class And(_Binary):

    def evaluate(self, assignment):
        return self.left.evaluate(assignment) and self.right.evaluate(assignment)


class Or(_Binary):

    def evaluate(self, assignment):
        return self.left.evaluate(assignment) or self.right.evaluate(assignment)


class Implies(_Binary):

    def evaluate(self, assignment):
        return not self.left.evaluate(assignment) or self.right.evaluate(assignment)


@dataclasses.dataclass(frozen=True)
class ConstTrue(Formula):

    def evaluate(self, assignment):
        return True

    def atoms(self):
        return set()


TRUE = ConstTrue()
FALSE = Not(TRUE)


def conjoin(formulas):
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def disjoin(formulas):
    result = None
    for f in formulas:
        result = f if result is None else Or(result, f)
    return FALSE if result is None else result


# Pretty printer. Output reparses to an equal tree.

def _receiver(term):
    text = render_term(term)
    return f'({text})' if isinstance(term, Cast) else text


def render_term(term):
    if isinstance(term, Var):
        return term.name
    if isinstance(term, FieldAccess):
        return f'{_receiver(term.receiver)}.{term.field}'
    if isinstance(term, Invoke):
        args = ', '.join(render_term(a) for a in term.args)
        return f'{_receiver(term.receiver)}.{term.method}({args})'
    if isinstance(term, New):
        args = ', '.join(render_term(a) for a in term.args)
        return f'new {term.class_name}({args})'
    if isinstance(term, Cast):
        return f'({term.target}) {render_term(term.operand)}'
    raise TypeError(f'not a term: {term!r}')


def render_method(method, indent='    '):
    params = ', '.join(str(p) for p in method.params)
    prefix = 'overrides ' if method.overrides else ''
    return (f'{indent}{prefix}{method.return_type} {method.name}({params}) {{\n'
            f'{indent}    return {render_term(method.body)};\n'
            f'{indent}}}')


def render_declaration(decl):
    if isinstance(decl, ClassDecl):
        head = f'class {decl.name} extends {decl.superclass} {{'
    else:
        head = f'refines class {decl.name} {{'
    lines = [head]
    lines += [f'    {f};' for f in decl.fields]
    lines += [render_method(m) for m in decl.methods]
    lines.append('}')
    return '\n'.join(lines)


_PRECEDENCE = {Implies: 1, Or: 2, And: 3, Not: 4, Atom: 5, ConstTrue: 5}


def render_formula(formula, parent=0):
    prec = _PRECEDENCE[type(formula)]
    if isinstance(formula, Atom):
        text = formula.feature
    elif isinstance(formula, ConstTrue):
        text = 'true'
    elif isinstance(formula, Not):
        text = 'not ' + render_formula(formula.operand, prec)
    elif isinstance(formula, Implies):
        # right-associative
        text = f'{render_formula(formula.left, prec + 1)} implies {render_formula(formula.right, prec)}'
    else:
        word = 'and' if isinstance(formula, And) else 'or'
        text = f'{render_formula(formula.left, prec)} {word} {render_formula(formula.right, prec + 1)}'
    return f'({text})' if prec < parent else text
