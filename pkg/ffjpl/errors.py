import dataclasses
import enum


class Severity(enum.Enum):
    ERROR = 'error'
    STUPID_WARNING = 'stupid-warning'


@dataclasses.dataclass(frozen=True)
class Diagnostic:
    """One failed check, as reported to the user.

    ``condition`` is the feature context under which a product-line check
    failed; diagnostics of single programs carry none.
    """
    code: str
    message: str
    location: object
    severity: Severity = Severity.ERROR
    condition: tuple = ()

    @property
    def is_error(self):
        return self.severity is Severity.ERROR

    def sort_key(self):
        loc = self.location
        return loc.file, loc.line, loc.column, self.code, self.message

    def render(self):
        line = f'{self.location}: {self.severity.value} {self.code}: {self.message}'
        if self.condition:
            line += ' [' + ', '.join(self.condition) + ']'
        return line

    def __str__(self):
        return self.render()


def accepted(diagnostics):
    """Warnings never reject a program."""
    return not any(d.is_error for d in diagnostics)


def sort_diagnostics(diagnostics):
    return sorted(diagnostics, key=Diagnostic.sort_key)


class FfjError(Exception):

    def __init__(self, message='unknown error', location=None):
        self.message = message
        self.location = location
        super().__init__(f'{location}: {message}' if location is not None else message)


class ParseError(FfjError):
    pass


class ReservedName(ParseError):
    pass


class DuplicateMember(ParseError):
    pass


class UnknownFeature(ParseError):

    def __init__(self, name, location=None):
        self.name = name
        super().__init__(f"unknown feature '{name}'", location)


class DuplicateFeature(ParseError):

    def __init__(self, name, location=None):
        self.name = name
        super().__init__(f"feature '{name}' listed twice", location)


class IngestError(FfjError):
    pass


class SanityViolation(FfjError):
    """A class, introduction or refinement table breaks a sanity condition.

    ``condition`` names the violated condition, e.g. ``inheritance-cycle``.
    """

    def __init__(self, condition, message, location=None):
        self.condition = condition
        super().__init__(f'{condition}: {message}', location)
        self.message = message

    def diagnostic(self):
        return Diagnostic(self.condition, self.message, self.location)


class UnknownClass(FfjError):

    def __init__(self, name, location=None):
        self.name = name
        super().__init__(f"unknown class '{name}'", location)


class FeatureNotInChain(FfjError):
    pass


class MethodNotFound(FfjError):

    def __init__(self, method, owner):
        self.method = method
        super().__init__(f"no method '{method}' in {owner}")


class TypeCheckError(FfjError):
    """Raised by term typing; carries every diagnostic of the failing rule."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0]
        super().__init__(f'{first.code}: {first.message}', first.location)


class InvalidSelection(FfjError):

    def __init__(self, selection):
        self.selection = tuple(selection)
        super().__init__('selection violates the feature model: [' + ','.join(self.selection) + ']')


class VariantOverflow(FfjError):
    pass
