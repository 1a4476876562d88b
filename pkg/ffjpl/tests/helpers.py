from pathlib import Path

from ffjpl.featuremodel import mandatory_model
from ffjpl.parser import SourceUnit, parse_feature_model, parse_term, parse_unit
from ffjpl.syntax import MAIN_FILE
from ffjpl.tables import FfjProgram, Mode, assemble_product_line, assemble_tables, ingest, read_text, sanity_violations

FIXTURES = Path(__file__).resolve().parent / 'fixtures'


def fixture(*parts):
    return FIXTURES.joinpath(*parts)


def load_model(name, model='model.features'):
    path = fixture(name, model)
    return parse_feature_model(read_text(path), filename=path.name)


def load_product_line(name, model='model.features', cache=None):
    return ingest(fixture(name), load_model(name, model), cache=cache)


def product_line(model_source, sources, main=None, cache=None):
    """A product line from ``{feature: source}``; ``main`` is ``(feature, term)``."""
    fm = parse_feature_model(model_source)
    units = [parse_unit(source, feature, f'{feature}/{feature}.ffj') for feature, source in sources.items()]
    if main is not None:
        feature, term = main
        units.append(parse_unit(term, feature, f'{feature}/{MAIN_FILE}', allow_term=True))
    return assemble_product_line(units, fm, cache)


def program(sources, main='new Object()'):
    """An FFJ program; ``sources`` is one source or ``{feature: source}`` in composition order."""
    if isinstance(sources, str):
        sources = {'Main': sources}
    declarations = [d for feature, source in sources.items()
                    for d in parse_unit(source, feature, f'{feature}/{feature}.ffj').declarations]
    features = tuple(sources)
    tables = assemble_tables(declarations, mandatory_model(features))
    return FfjProgram(parse_term(main), tables.class_table, tables.refinement_table, features,
                      tuple(tables.class_table.values()), tuple(sanity_violations(tables, Mode.FFJ)))


def mandatory_product_line(ffj_program, cache=None):
    """The product line in which every feature of ``ffj_program`` is mandatory."""
    features = ffj_program.features or ('Main',)
    units = {}
    for decl in ffj_program.declarations:
        units.setdefault(decl.feature, []).append(decl)
    sources = [SourceUnit(feature, f'{feature}/{feature}.ffj', tuple(decls)) for feature, decls in units.items()]
    sources.append(SourceUnit(features[0], f'{features[0]}/{MAIN_FILE}', (), ffj_program.main_term))
    return assemble_product_line(sources, mandatory_model(features), cache)


def codes(diagnostics):
    return {d.code for d in diagnostics if d.is_error}
