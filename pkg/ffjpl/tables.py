"""Class, introduction and refinement tables, and the programs built on them."""
import dataclasses
import enum
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import NamedTuple, Tuple

from .errors import IngestError, SanityViolation, UnknownClass, sort_diagnostics
from .featuremodel import FeatureModelAnalysis
from .parser import parse_unit
from .syntax import (
    BASE, FALSE, MAIN_FILE, OBJECT, TRUE, And, Atom, ClassDecl, New, Term, conjoin, disjoin,
    referenced_classes,
)

logger = logging.getLogger(__name__)


class QualifiedType(NamedTuple):
    feature: str
    class_name: str

    def __str__(self):
        return f'{self.feature}.{self.class_name}'


BASE_OBJECT = QualifiedType(BASE, OBJECT)


class FieldRef(NamedTuple):
    class_name: str
    field: str

    def __str__(self):
        return f'{self.class_name}.{self.field}'


class MethodRef(NamedTuple):
    class_name: str
    method: str

    def __str__(self):
        return f'{self.class_name}.{self.method}'


class Mode(enum.Enum):
    FFJ = 'ffj'
    PL = 'pl'


class ClassTable(Mapping):
    """Declarations keyed by qualified type, in composition order."""

    def __init__(self, entries=()):
        self._entries = dict(entries)

    def __getitem__(self, qt):
        return self._entries[qt]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def declaration(self, qt):
        try:
            return self._entries[qt]
        except KeyError:
            raise UnknownClass(str(qt)) from None

    def introductions(self, class_name):
        """Class declarations of ``class_name``, in composition order."""
        return [d for qt, d in self._entries.items() if qt.class_name == class_name and isinstance(d, ClassDecl)]


class RefinementTable(Mapping):
    """RT: class name to the features that introduce or refine it."""

    def __init__(self, chains=()):
        self._chains = {name: tuple(chain) for name, chain in dict(chains).items()}

    def __getitem__(self, class_name):
        return self._chains[class_name]

    def __iter__(self):
        return iter(self._chains)

    def __len__(self):
        return len(self._chains)

    def chain(self, class_name):
        try:
            return self._chains[class_name]
        except KeyError:
            raise UnknownClass(class_name) from None

    def preceding(self, qt):
        chain = self.chain(qt.class_name)
        return chain[:chain.index(qt.feature)] if qt.feature in chain else ()


class IntroductionTable:
    """IT: which features introduce a class, a field or a method."""

    def __init__(self, classes=None, fields=None, methods=None, superclasses=None):
        self.classes = classes or {}
        self.fields = fields or {}
        self.methods = methods or {}
        # (feature, class) -> superclass named by that introduction
        self.superclasses = superclasses or {}

    def of_class(self, class_name):
        return self.classes.get(class_name, ())

    def of_field(self, class_name, field):
        return self.fields.get((class_name, field), ())

    def of_method(self, class_name, method):
        return self.methods.get((class_name, method), ())

    def presence(self, element, scope=None):
        """The condition under which ``element`` exists in a variant.

        A member exists when one of its own introducers is selected, or when
        an introducer of its class is selected whose superclass has it.
        """
        if isinstance(element, str):
            if element == OBJECT:
                return TRUE
            return disjoin(Atom(f) for f in self.of_class(element) if scope is None or f in scope)
        return self._member_presence(element, scope, frozenset())

    def _member_presence(self, element, scope, visited):
        class_name = element.class_name
        if class_name == OBJECT or class_name in visited:
            return FALSE
        visited = visited | {class_name}
        if isinstance(element, FieldRef):
            own = self.of_field(class_name, element.field)
        else:
            own = self.of_method(class_name, element.method)
        terms = [Atom(f) for f in own if scope is None or f in scope]
        for feature in self.of_class(class_name):
            if scope is not None and feature not in scope:
                continue
            inherited = element._replace(class_name=self.superclasses[QualifiedType(feature, class_name)])
            below = self._member_presence(inherited, None, visited)
            if below != FALSE:
                terms.append(And(Atom(feature), below))
        return disjoin(terms)


class Tables(NamedTuple):
    class_table: ClassTable
    introduction_table: IntroductionTable
    refinement_table: RefinementTable


def _position(decl):
    return decl.location.file, decl.location.line, decl.location.column


def _frozen(table):
    return {key: tuple(value) for key, value in table.items()}


def assemble_tables(declarations, feature_model):
    """Build CT, IT and RT, rejecting only structural conflicts.

    Raises SanityViolation for undeclared features, declarations of Object,
    duplicate qualified types and a feature that both introduces and refines
    a class.
    """
    for decl in declarations:
        if decl.feature not in feature_model.features:
            raise SanityViolation('undeclared-feature', f"'{decl.feature}' is not a feature of the model",
                                  decl.location)
    ordered = sorted(declarations, key=lambda d: (feature_model.position(d.feature),) + _position(d))
    entries = {}
    chains = {}
    classes, fields, methods, superclasses = {}, {}, {}, {}
    for decl in ordered:
        if decl.name == OBJECT:
            raise SanityViolation('object-declared', f'{OBJECT} is predeclared', decl.location)
        qt = QualifiedType(decl.feature, decl.name)
        if qt in entries:
            previous = entries[qt]
            if type(previous) is type(decl):
                raise SanityViolation('duplicate-declaration', f'{qt} is declared twice', decl.location)
            raise SanityViolation('introduce-and-refine', f'feature {decl.feature} both introduces and refines '
                                  f'{decl.name}', decl.location)
        entries[qt] = decl
        chains.setdefault(decl.name, []).append(decl.feature)
        if isinstance(decl, ClassDecl):
            classes.setdefault(decl.name, []).append(decl.feature)
            superclasses[qt] = decl.superclass
        for f in decl.fields:
            fields.setdefault((decl.name, f.name), []).append(decl.feature)
        for method in decl.methods:
            if not method.overrides:
                methods.setdefault((decl.name, method.name), []).append(decl.feature)
    it = IntroductionTable(_frozen(classes), _frozen(fields), _frozen(methods), superclasses)
    return Tables(ClassTable(entries), it, RefinementTable(chains))


def _unknown_classes(tables):
    rt = tables.refinement_table
    for decl in tables.class_table.values():
        for name, location in referenced_classes(decl):
            if name != OBJECT and name not in rt:
                yield SanityViolation('unknown-class', f"class '{name}' is not declared", location)


def _ffj_cycles(tables):
    ct = tables.class_table
    reported = set()
    for decl in ct.values():
        if not isinstance(decl, ClassDecl) or decl.name in reported:
            continue
        path = [decl.name]
        current = decl.superclass
        while current != OBJECT and current not in path:
            introductions = ct.introductions(current)
            if not introductions:
                break
            path.append(current)
            current = introductions[0].superclass
        if current in path and current == decl.name:
            reported.update(path)
            yield SanityViolation('inheritance-cycle', 'cyclic inheritance: ' + ' -> '.join(path + [current]),
                                  decl.location)


def _pl_cycles(tables, analysis):
    """Cycles that some set of co-present introducers can close."""
    ct = tables.class_table
    it = tables.introduction_table
    reported = set()

    def walk(class_name, context, path):
        for feature in it.of_class(class_name):
            grown = tuple(sorted(set(context) | {feature}))
            if not analysis.satisfiable(conjoin(Atom(f) for f in grown)):
                continue
            superclass = it.superclasses[QualifiedType(feature, class_name)]
            if superclass == path[0]:
                return path + [superclass], ct[QualifiedType(feature, class_name)]
            if superclass == OBJECT or superclass in path:
                continue
            found = walk(superclass, grown, path + [superclass])
            if found:
                return found
        return None

    for class_name in it.classes:
        if class_name in reported:
            continue
        found = walk(class_name, (), [class_name])
        if found:
            path, decl = found
            reported.update(path)
            yield SanityViolation('inheritance-cycle', 'cyclic inheritance: ' + ' -> '.join(path), decl.location)


def sanity_violations(tables, mode=Mode.FFJ, analysis=None):
    """Unknown class names and inheritance cycles, in source order."""
    violations = list(_unknown_classes(tables))
    if mode is Mode.FFJ:
        violations += _ffj_cycles(tables)
    else:
        violations += _pl_cycles(tables, analysis)
    return sorted(violations, key=lambda v: v.diagnostic().sort_key())


def build_tables(declarations, feature_model, mode=Mode.PL, analysis=None):
    tables = assemble_tables(declarations, feature_model)
    if mode is Mode.PL and analysis is None:
        analysis = FeatureModelAnalysis(feature_model)
    violations = sanity_violations(tables, mode, analysis)
    if violations:
        raise violations[0]
    return tables


@dataclasses.dataclass
class ProductLine:
    main_term: Term
    main_context: str
    class_table: ClassTable
    introduction_table: IntroductionTable
    refinement_table: RefinementTable
    feature_model: object
    analysis: FeatureModelAnalysis
    declarations: Tuple = ()
    sources: Tuple[Tuple[str, str], ...] = ()
    main_file: str = ''


@dataclasses.dataclass
class FfjProgram:
    main_term: Term
    class_table: ClassTable
    refinement_table: RefinementTable
    features: Tuple[str, ...] = ()
    declarations: Tuple = ()
    violations: Tuple = ()

    @property
    def diagnostics(self):
        return sort_diagnostics(v.diagnostic() for v in self.violations)


def assemble_product_line(units, feature_model, cache=None):
    """A product line from parsed source units."""
    units = list(units)
    analysis = FeatureModelAnalysis(feature_model, cache)
    declarations = [decl for unit in units for decl in unit.declarations]
    tables = build_tables(declarations, feature_model, Mode.PL, analysis)
    mains = [unit for unit in units if unit.term is not None]
    if len(mains) > 1:
        raise SanityViolation('multiple-main-terms', 'more than one main term: '
                              + ', '.join(unit.filename for unit in mains), mains[1].term.location)
    if mains:
        main_term, main_context, main_file = mains[0].term, mains[0].feature, mains[0].filename
    else:
        main_term, main_context, main_file = New(OBJECT), feature_model.features[0], ''
    ct = tables.class_table
    logger.debug('product line: %d features, %d declarations, %d classes',
                 len(feature_model.features), len(ct), len(tables.refinement_table))
    return ProductLine(
        main_term, main_context, ct, tables.introduction_table, tables.refinement_table,
        feature_model, analysis, tuple(ct.values()),
        tuple(sorted(((u.feature, u.filename) for u in units),
                     key=lambda s: (feature_model.position(s[0]), s[1]))),
        main_file,
    )


def ingest(root, feature_model, cache=None):
    """Parse every ``<root>/<Feature>/*.ffj`` file into a product line."""
    root = Path(root)
    if not root.is_dir():
        raise IngestError(f'{root} is not a directory')
    units = []
    for directory in sorted(root.iterdir()):
        if not directory.is_dir() or directory.name.startswith('.'):
            continue
        if directory.name not in feature_model.features:
            raise SanityViolation('undeclared-feature', f"directory '{directory.name}' names no feature of the model")
        for path in sorted(directory.glob('*.ffj')):
            filename = path.relative_to(root).as_posix()
            try:
                source = path.read_text(encoding='utf-8')
            except (OSError, UnicodeDecodeError) as exc:
                raise IngestError(f'cannot read {filename}: {exc}') from exc
            logger.debug('parsing %s', filename)
            units.append(parse_unit(source, directory.name, filename, allow_term=path.name == MAIN_FILE))
    return assemble_product_line(units, feature_model, cache)


def read_text(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f'cannot read {path}: {exc}') from exc

