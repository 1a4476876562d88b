"""Small-step call-by-value evaluation of FFJ terms."""
import dataclasses
import logging

from .errors import FfjError
from .lookup import fields, last, mbody, subtype
from .syntax import THIS, Cast, FieldAccess, Invoke, New, Term, Var, is_value

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class Stuck:
    redex: Term

    @property
    def location(self):
        return self.redex.location

    def __str__(self):
        return f'STUCK at {self.location}'


class Normal:
    __slots__ = ()

    def __repr__(self):
        return 'NORMAL'


NORMAL = Normal()


@dataclasses.dataclass(frozen=True)
class OutOfFuel:
    term: Term

    def __str__(self):
        return 'FUEL EXHAUSTED'


def substitute(term, bindings):
    if isinstance(term, Var):
        return bindings.get(term.name, term)
    if isinstance(term, FieldAccess):
        return dataclasses.replace(term, receiver=substitute(term.receiver, bindings))
    if isinstance(term, Invoke):
        return dataclasses.replace(term, receiver=substitute(term.receiver, bindings),
                                   args=tuple(substitute(a, bindings) for a in term.args))
    if isinstance(term, New):
        return dataclasses.replace(term, args=tuple(substitute(a, bindings) for a in term.args))
    return dataclasses.replace(term, operand=substitute(term.operand, bindings))


def eval_step(ct, rt, term):
    """One leftmost-innermost step: a new term, a Stuck redex, or NORMAL for values."""
    if is_value(term):
        return NORMAL
    return _reduce(ct, rt, term)


def _first_open(args):
    return next(i for i, arg in enumerate(args) if not is_value(arg))


def _reduce_args(ct, rt, args, rebuild):
    i = _first_open(args)
    result = _reduce(ct, rt, args[i])
    if isinstance(result, Stuck):
        return result
    return rebuild(args[:i] + (result,) + args[i + 1:])


def _reduce(ct, rt, term):
    if isinstance(term, Var):
        return Stuck(term)

    if isinstance(term, FieldAccess):
        receiver = term.receiver
        if not is_value(receiver):
            result = _reduce(ct, rt, receiver)
            return result if isinstance(result, Stuck) else dataclasses.replace(term, receiver=result)
        try:
            names = [f.name for f in fields(ct, rt, last(rt, receiver.class_name))]
        except FfjError:
            return Stuck(term)
        if len(names) != len(receiver.args) or term.field not in names:
            return Stuck(term)
        return receiver.args[names.index(term.field)]

    if isinstance(term, Invoke):
        receiver = term.receiver
        if not is_value(receiver):
            result = _reduce(ct, rt, receiver)
            return result if isinstance(result, Stuck) else dataclasses.replace(term, receiver=result)
        if not all(is_value(a) for a in term.args):
            return _reduce_args(ct, rt, term.args, lambda args: dataclasses.replace(term, args=args))
        try:
            found = mbody(ct, rt, term.method, last(rt, receiver.class_name))
        except FfjError:
            return Stuck(term)
        if len(found.params) != len(term.args):
            return Stuck(term)
        bindings = dict(zip(found.params, term.args))
        bindings[THIS] = receiver
        return substitute(found.body, bindings)

    if isinstance(term, New):
        return _reduce_args(ct, rt, term.args, lambda args: dataclasses.replace(term, args=args))

    if isinstance(term, Cast):
        operand = term.operand
        if not is_value(operand):
            result = _reduce(ct, rt, operand)
            return result if isinstance(result, Stuck) else dataclasses.replace(term, operand=result)
        try:
            if subtype(ct, operand.class_name, term.target):
                return operand
        except FfjError:
            pass
        return Stuck(term)

    raise TypeError(f'not a term: {term!r}')


def steps(ct, rt, term, fuel):
    """Yield the successors of ``term`` for at most ``fuel`` steps.

    The final item is NORMAL, a Stuck result, or the last term reached.
    """
    for _ in range(fuel):
        result = eval_step(ct, rt, term)
        yield result
        if not isinstance(result, Term):
            return
        term = result


def evaluate(ct, rt, term, fuel):
    """Run ``term`` to a value; returns the value, a Stuck result or OutOfFuel."""
    if fuel <= 0:
        raise ValueError('fuel must be positive')
    count = 0
    for result in steps(ct, rt, term, fuel):
        if result is NORMAL:
            logger.debug('value after %d steps', count)
            return term
        if isinstance(result, Stuck):
            logger.debug('stuck after %d steps at %s', count, result.location)
            return result
        term = result
        count += 1
    if is_value(term):
        return term
    return OutOfFuel(term)
