"""Feature models and the never/sometimes/always queries over them."""
import dataclasses
import functools
import hashlib
import logging
from typing import Tuple

from django.conf import settings
from django.core.cache import caches

from .errors import ReservedName, UnknownFeature
from .sat import Cnf, solve
from .syntax import BASE, TRUE, Atom, Formula, Not, conjoin, disjoin, render_formula

logger = logging.getLogger(__name__)

_MISSING = object()


@dataclasses.dataclass(frozen=True)
class FeatureModel:
    features: Tuple[str, ...]
    constraints: Tuple[Formula, ...] = ()

    def __post_init__(self):
        if BASE in self.features:
            raise ReservedName(f"'{BASE}' is reserved and cannot be declared")

    @property
    def constraint(self):
        return conjoin(self.constraints)

    @functools.cached_property
    def _positions(self):
        return {name: i for i, name in enumerate(self.features)}

    def position(self, feature):
        if feature == BASE:
            return -1
        try:
            return self._positions[feature]
        except KeyError:
            raise UnknownFeature(feature) from None

    def sort(self, features):
        return tuple(sorted(set(features), key=self.position))

    def check(self, features):
        for feature in features:
            self.position(feature)

    def evaluate(self, selection):
        """Truth of the constraint under selected=true, others=false."""
        chosen = set(selection)
        assignment = {f: f in chosen for f in self.features}
        return all(c.evaluate(assignment) for c in self.constraints)

    @functools.cached_property
    def fingerprint(self):
        return hashlib.sha1(str(self).encode('utf-8')).hexdigest()

    def __str__(self):
        lines = ['features:']
        lines += [f'  {f}' for f in self.features]
        lines.append('model:')
        lines += [f'  {render_formula(c)};' for c in self.constraints]
        return '\n'.join(lines) + '\n'


def mandatory_model(features):
    """A model in which every listed feature is required."""
    features = tuple(features)
    return FeatureModel(features, tuple(Atom(f) for f in features))


@dataclasses.dataclass(frozen=True)
class AlwaysAlone:
    feature: str


@dataclasses.dataclass(frozen=True)
class AlwaysInGroup:
    features: Tuple[str, ...]


@dataclasses.dataclass(frozen=True)
class NeverForced:
    pass


class FeatureModelAnalysis:
    """Cached propositional queries against one feature model.

    Results are stored in a Django cache under a key derived from the model,
    the operation and its arguments. The model is immutable, so entries are
    never invalidated.
    """

    def __init__(self, feature_model, cache=None):
        self.feature_model = feature_model
        if cache is None:
            cache = caches[settings.FFJ_QUERY_CACHE]
        self.cache = cache
        self._cnf = Cnf(feature_model.features)
        self._cnf.assert_formula(feature_model.constraint)

    def _context(self, context):
        return self.feature_model.sort(context)

    def _cached(self, operation, arguments, compute):
        key = 'ffjpl:' + hashlib.sha1(
            repr((self.feature_model.fingerprint, operation, arguments)).encode('utf-8')).hexdigest()
        value = self.cache.get(key, _MISSING)
        if value is not _MISSING:
            logger.debug('cache hit %s%r', operation, arguments)
            return value
        logger.debug('cache miss %s%r', operation, arguments)
        value = compute()
        self.cache.set(key, value, timeout=None)
        return value

    def witness(self, extra=TRUE):
        """A satisfying assignment of the constraint and ``extra``, or None."""
        self.feature_model.check(extra.atoms())
        cnf = self._cnf.copy()
        cnf.assert_formula(extra)
        model = solve(cnf)
        if model is None:
            return None
        return {f: model[cnf.index[f]] for f in self.feature_model.features}

    def satisfiable(self, extra=TRUE):
        return self._cached('satisfiable', str(extra), lambda: self.witness(extra) is not None)

    def _conjunction(self, context, *more):
        return conjoin([Atom(f) for f in context] + list(more))

    def sometimes(self, context, feature):
        context = self._context(context)
        self.feature_model.check([feature])
        return self._cached('sometimes', (context, feature),
                            lambda: self.witness(self._conjunction(context, Atom(feature))) is not None)

    def never(self, context, feature):
        return not self.sometimes(context, feature)

    def implies(self, context, formula):
        """Whether every variant containing ``context`` satisfies ``formula``."""
        context = self._context(context)
        return not self.satisfiable(self._conjunction(context, Not(formula)))

    def always(self, context, feature, candidates=()):
        context = self._context(context)
        candidates = tuple(candidates)
        self.feature_model.check((feature,) + candidates)
        return self._cached('always', (context, feature, candidates),
                            lambda: self._always(context, feature, candidates))

    def _always(self, context, feature, candidates):
        if self.implies(context, Atom(feature)):
            return AlwaysAlone(feature)
        group = [feature]
        for candidate in self.feature_model.sort(candidates):
            if candidate == feature or not self.sometimes(context, candidate):
                continue
            if all(self.never(context + (member,), candidate) for member in group):
                group.append(candidate)
        group = self.feature_model.sort(group)
        if len(group) > 1 and self.implies(context, disjoin(Atom(f) for f in group)):
            return AlwaysInGroup(group)
        return NeverForced()

    def reachable(self, it, context, element, scope=None):
        """Whether ``element`` is present in every variant containing ``context``.

        ``it`` supplies the presence condition of the element; ``scope``
        restricts the introducers that count.
        """
        return self.implies(context, it.presence(element, scope))

    def possible(self, it, context, element, scope=None):
        """Whether ``element`` is present in some variant containing ``context``."""
        context = self._context(context)
        return self.satisfiable(self._conjunction(context, it.presence(element, scope)))

    def valid_selection(self, selection):
        selection = self._context(selection)

        def compute():
            chosen = set(selection)
            literals = [Atom(f) if f in chosen else Not(Atom(f)) for f in self.feature_model.features]
            return self.witness(conjoin(literals)) is not None
        return self._cached('valid_selection', selection, compute)
