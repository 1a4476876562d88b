"""Lexer and recursive-descent parsers for ``.ffj``, ``.features`` and ``.sel`` files."""
import re
from typing import NamedTuple, Optional, Tuple

from .errors import DuplicateFeature, DuplicateMember, ParseError, ReservedName, UnknownFeature
from .featuremodel import FeatureModel
from .syntax import (
    BASE, KEYWORDS, MODEL_KEYWORDS, THIS, And, Atom, Cast, ClassDecl, FieldAccess, FieldDecl, Implies,
    Invoke, MethodDecl, New, Not, Or, Param, RefinementDecl, SourceLocation, Var, formula_depth, term_depth,
)

_TOKEN_RE = re.compile(r'''
    (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<unterminated>/\*)
  | (?P<newline>\n)
  | (?P<space>[ \t\r\f\v]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}();,.:])
  | (?P<mismatch>.)
''', re.VERBOSE | re.DOTALL)

IDENT = 'ident'
PUNCT = 'punct'
EOF = 'eof'

# Deepest term and deepest constraint the parsers accept.
MAX_TERM_DEPTH = 100
MAX_FORMULA_DEPTH = 256


class Token(NamedTuple):
    kind: str
    text: str
    location: SourceLocation


def tokenize(source, filename='<string>'):
    tokens = []
    line, line_start = 1, 0
    for match in _TOKEN_RE.finditer(source):
        kind = match.lastgroup
        text = match.group()
        location = SourceLocation(filename, line, match.start() - line_start + 1)
        if kind == 'newline':
            line, line_start = line + 1, match.end()
        elif kind == 'comment':
            breaks = text.count('\n')
            if breaks:
                line += breaks
                line_start = match.start() + text.rindex('\n') + 1
        elif kind == 'unterminated':
            raise ParseError('unterminated block comment', location)
        elif kind == 'mismatch':
            raise ParseError(f'unexpected character {text!r}', location)
        elif kind != 'space':
            tokens.append(Token(kind, text, location))
    tokens.append(Token(EOF, '', SourceLocation(filename, line, len(source) - line_start + 1)))
    return tokens


class SourceUnit(NamedTuple):
    """The parse of one ``.ffj`` file."""
    feature: str
    filename: str
    declarations: Tuple
    term: Optional[object] = None


class _Parser:

    def __init__(self, source, filename):
        self.tokens = tokenize(source, filename)
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek(self, text=None, kind=None, offset=0):
        token = self.tokens[min(self.pos + offset, len(self.tokens) - 1)]
        if kind is not None and token.kind != kind:
            return False
        if text is not None and (token.kind == EOF or token.text != text):
            return False
        return True

    def advance(self):
        token = self.current
        if token.kind != EOF:
            self.pos += 1
        return token

    def accept(self, text):
        if self.peek(text):
            return self.advance()
        return None

    def fail(self, message, token=None):
        token = token or self.current
        found = 'end of input' if token.kind == EOF else repr(token.text)
        raise ParseError(f'{message}, found {found}', token.location)

    def expect(self, text):
        if not self.peek(text):
            self.fail(f"expected '{text}'")
        return self.advance()

    def at_eof(self):
        return self.current.kind == EOF


class _ProgramParser(_Parser):

    def __init__(self, source, feature, filename):
        super().__init__(source, filename)
        self.feature = feature

    def identifier(self, what):
        token = self.current
        if token.kind != IDENT or token.text in KEYWORDS:
            self.fail(f'expected {what}')
        return self.advance()

    def unit(self, allow_term):
        declarations = []
        term = None
        while not self.at_eof():
            if self.peek('class'):
                declarations.append(self.class_declaration())
            elif self.peek('refines'):
                declarations.append(self.refinement())
            elif allow_term:
                term = self.checked_term()
                if not self.at_eof():
                    self.fail('expected end of input after the main term')
            else:
                self.fail('expected a class or refinement declaration')
        return declarations, term

    def class_declaration(self):
        location = self.expect('class').location
        name = self.identifier('a class name').text
        self.expect('extends')
        superclass = self.identifier('a superclass name').text
        fields, methods = self.body(name)
        return ClassDecl(name, superclass, fields, methods, self.feature, location)

    def refinement(self):
        location = self.expect('refines').location
        self.expect('class')
        name = self.identifier('a class name').text
        fields, methods = self.body(name)
        return RefinementDecl(name, fields, methods, self.feature, location)

    def _is_method_start(self):
        return self.peek('overrides') or self.peek('(', offset=2)

    def body(self, owner):
        self.expect('{')
        fields, methods = [], []
        field_names, method_names = set(), set()
        while not self.peek('}'):
            if self.at_eof():
                self.fail(f"expected '}}' closing class {owner}")
            if self._is_method_start():
                method = self.method()
                if method.name in method_names:
                    raise DuplicateMember(f"method '{method.name}' declared twice in {owner}", method.location)
                method_names.add(method.name)
                methods.append(method)
                continue
            if methods:
                self.fail('fields must precede methods')
            class_name = self.identifier('a field type').text
            token = self.identifier('a field name')
            self.expect(';')
            if token.text in field_names:
                raise DuplicateMember(f"field '{token.text}' declared twice in {owner}", token.location)
            field_names.add(token.text)
            fields.append(FieldDecl(class_name, token.text))
        self.expect('}')
        return tuple(fields), tuple(methods)

    def method(self):
        start = self.current
        overrides = self.accept('overrides') is not None
        return_type = self.identifier('a return type').text
        name = self.identifier('a method name').text
        self.expect('(')
        params = []
        while not self.peek(')'):
            if params:
                self.expect(',')
            class_name = self.identifier('a parameter type').text
            token = self.identifier('a parameter name')
            if token.text == THIS:
                raise ReservedName("'this' cannot be a parameter name", token.location)
            if any(p.name == token.text for p in params):
                raise DuplicateMember(f"parameter '{token.text}' declared twice in {name}", token.location)
            params.append(Param(class_name, token.text))
        self.expect(')')
        self.expect('{')
        self.expect('return')
        body = self.checked_term()
        self.expect(';')
        self.expect('}')
        return MethodDecl(return_type, name, tuple(params), body, overrides, start.location)

    def _starts_term(self, offset):
        token = self.tokens[min(self.pos + offset, len(self.tokens) - 1)]
        if token.kind == IDENT:
            return token.text == 'new' or token.text not in KEYWORDS
        return token.text == '('

    def checked_term(self):
        term = self.term()
        depth, location = term_depth(term)
        if depth > MAX_TERM_DEPTH:
            raise ParseError(f'term nested more than {MAX_TERM_DEPTH} levels deep', location)
        return term

    def term(self):
        if (self.peek('(') and self.peek(kind=IDENT, offset=1) and self.peek(')', offset=2)
                and self.tokens[self.pos + 1].text not in KEYWORDS and self._starts_term(3)):
            location = self.advance().location
            target = self.advance().text
            self.advance()
            return Cast(target, self.term(), location)
        return self.postfix()

    def postfix(self):
        term = self.primary()
        while self.accept('.'):
            token = self.identifier('a field or method name')
            if self.peek('('):
                term = Invoke(term, token.text, self.arguments(), token.location)
            else:
                term = FieldAccess(term, token.text, token.location)
        return term

    def arguments(self):
        self.expect('(')
        args = []
        while not self.peek(')'):
            if args:
                self.expect(',')
            args.append(self.term())
        self.expect(')')
        return tuple(args)

    def primary(self):
        if self.peek('new'):
            location = self.advance().location
            name = self.identifier('a class name').text
            return New(name, self.arguments(), location)
        if self.accept('('):
            term = self.term()
            self.expect(')')
            return term
        token = self.identifier('a term')
        return Var(token.text, token.location)


def _guarded(parse, parser):
    try:
        return parse()
    except RecursionError:
        raise ParseError('input nested too deeply', parser.current.location) from None


def parse_unit(source, feature='', filename='<string>', allow_term=False):
    """Parse one ``.ffj`` file into a :class:`SourceUnit`.

    Only ``main.ffj`` may end with a bare term; pass ``allow_term`` for it.
    """
    parser = _ProgramParser(source, feature, filename)
    declarations, term = _guarded(lambda: parser.unit(allow_term), parser)
    return SourceUnit(feature, filename, tuple(declarations), term)


def parse_program(source, feature='', filename='<string>'):
    return list(parse_unit(source, feature, filename).declarations)


def parse_term(source, filename='<string>'):
    parser = _ProgramParser(source, '', filename)

    def parse():
        term = parser.checked_term()
        if not parser.at_eof():
            parser.fail('expected end of input')
        return term
    return _guarded(parse, parser)


class _ModelParser(_Parser):

    def feature_name(self):
        token = self.current
        if token.kind != IDENT or token.text in MODEL_KEYWORDS:
            self.fail('expected a feature name')
        if token.text == BASE:
            raise ReservedName(f"'{BASE}' is reserved and cannot be declared", token.location)
        return self.advance()

    def model(self):
        self.expect('features')
        self.expect(':')
        features = []
        while not self.peek('model'):
            token = self.feature_name()
            if token.text in features:
                raise DuplicateFeature(token.text, token.location)
            features.append(token.text)
        if not features:
            self.fail('expected at least one feature')
        self.expect('model')
        self.expect(':')
        constraints = []
        while not self.at_eof():
            start = self.current
            constraint = self.implication()
            if formula_depth(constraint) > MAX_FORMULA_DEPTH:
                raise ParseError(f'constraint nested more than {MAX_FORMULA_DEPTH} levels deep', start.location)
            constraints.append(constraint)
            self.expect(';')
        for constraint in constraints:
            self._check_atoms(constraint, features)
        return FeatureModel(tuple(features), tuple(constraints))

    def _check_atoms(self, formula, features):
        if isinstance(formula, Atom):
            if formula.feature not in features:
                raise UnknownFeature(formula.feature, formula.location)
        elif isinstance(formula, Not):
            self._check_atoms(formula.operand, features)
        else:
            self._check_atoms(formula.left, features)
            self._check_atoms(formula.right, features)

    def implication(self):
        left = self.disjunction()
        if self.accept('implies'):
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        formula = self.conjunction()
        while self.accept('or'):
            formula = Or(formula, self.conjunction())
        return formula

    def conjunction(self):
        formula = self.negation()
        while self.accept('and'):
            formula = And(formula, self.negation())
        return formula

    def negation(self):
        if self.accept('not'):
            return Not(self.negation())
        if self.accept('('):
            formula = self.implication()
            self.expect(')')
            return formula
        token = self.current
        if token.kind != IDENT or token.text in MODEL_KEYWORDS:
            self.fail('expected a feature name')
        self.advance()
        return Atom(token.text, token.location)


def parse_feature_model(source, filename='<model>'):
    parser = _ModelParser(source, filename)
    return _guarded(parser.model, parser)


def parse_selection(source, filename='<selection>'):
    selection = []
    for token in tokenize(source, filename):
        if token.kind == EOF:
            break
        if token.kind != IDENT:
            raise ParseError(f'expected a feature name, found {token.text!r}', token.location)
        if token.text == BASE:
            raise ReservedName(f"'{BASE}' cannot be selected", token.location)
        if token.text in selection:
            raise DuplicateFeature(token.text, token.location)
        selection.append(token.text)
    return selection
