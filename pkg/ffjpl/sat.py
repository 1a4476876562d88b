"""Propositional satisfiability: Tseitin translation to CNF and a DPLL solver.

Variables are positive integers. Named variables (features) are numbered
first, in the order they were declared, so the solver branches on features
before auxiliary variables and witnesses are reproducible.
"""
from .syntax import And, Atom, ConstTrue, Implies, Not, Or


class Cnf:

    def __init__(self, names=()):
        self.names = []
        self.index = {}
        self.count = 0
        self.clauses = []
        self._true = None
        for name in names:
            self.variable(name)

    def variable(self, name):
        if name not in self.index:
            self.count += 1
            self.index[name] = self.count
            self.names.append(name)
        return self.index[name]

    def fresh(self):
        self.count += 1
        return self.count

    def add_clause(self, *literals):
        self.clauses.append(tuple(literals))

    def copy(self):
        other = Cnf()
        other.names = list(self.names)
        other.index = dict(self.index)
        other.count = self.count
        other.clauses = list(self.clauses)
        other._true = self._true
        return other

    def encode(self, formula):
        """Return a literal equisatisfiable with ``formula``, adding its defining clauses."""
        if isinstance(formula, Atom):
            return self.variable(formula.feature)
        if isinstance(formula, ConstTrue):
            if self._true is None:
                self._true = self.fresh()
                self.add_clause(self._true)
            return self._true
        if isinstance(formula, Not):
            return -self.encode(formula.operand)
        if isinstance(formula, Implies):
            return self.encode(Or(Not(formula.left), formula.right))
        a = self.encode(formula.left)
        b = self.encode(formula.right)
        x = self.fresh()
        if isinstance(formula, And):
            self.add_clause(-x, a)
            self.add_clause(-x, b)
            self.add_clause(x, -a, -b)
        elif isinstance(formula, Or):
            self.add_clause(-x, a, b)
            self.add_clause(x, -a)
            self.add_clause(x, -b)
        else:
            raise TypeError(f'not a formula: {formula!r}')
        return x

    def assert_formula(self, formula):
        """Add ``formula`` as a constraint. Top-level conjuncts are asserted one by one."""
        pending = [formula]
        while pending:
            formula = pending.pop()
            if isinstance(formula, And):
                pending += [formula.right, formula.left]
            else:
                self.add_clause(self.encode(formula))


def _propagate(clauses, assignment):
    """Unit propagation in place. Returns False on a conflict."""
    changed = True
    while changed:
        changed = False
        for clause in clauses:
            open_literal = None
            open_count = 0
            for literal in clause:
                value = assignment.get(abs(literal))
                if value is None:
                    open_literal = literal
                    open_count += 1
                elif value == (literal > 0):
                    break
            else:
                if open_count == 0:
                    return False
                if open_count == 1:
                    assignment[abs(open_literal)] = open_literal > 0
                    changed = True
    return True


def solve(cnf):
    """DPLL search. Returns a total assignment {variable: bool} or None."""
    order = range(1, cnf.count + 1)
    stack = [{}]
    while stack:
        assignment = stack.pop()
        if not _propagate(cnf.clauses, assignment):
            continue
        variable = next((v for v in order if v not in assignment), None)
        if variable is None:
            return assignment
        # false is tried first
        stack.append({**assignment, variable: True})
        stack.append({**assignment, variable: False})
    return None


def satisfiable(formula, names=()):
    """Witness {name: bool} for ``formula``, or None."""
    cnf = Cnf(names)
    cnf.assert_formula(formula)
    model = solve(cnf)
    if model is None:
        return None
    return {name: model[cnf.index[name]] for name in cnf.names}
