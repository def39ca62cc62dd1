"""Syntax tree of sizing plans.

Every node remembers the line and column it was parsed from; positions do
not take part in equality, so two plans that differ only in layout compare
equal.

"""
from dataclasses import dataclass, field

__all__ = [
    'Number',
    'Name',
    'Accessor',
    'Unary',
    'Binary',
    'Call',
    'Compare',
    'Classify',
    'Length',
    'Let',
    'If',
    'SizeIndependent',
    'SizeMirror',
    'SizeMatched',
    'Set',
    'Predict',
    'references',
    'walk_statements',
]


def _position():
    return field(default=0, compare=False, repr=False)


# expressions

@dataclass(frozen=True)
class Number(object):
    value: float
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Name(object):
    name: str
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Accessor(object):
    """``scope.attr`` or ``scope.item.attr``; item is None for the former."""
    scope: str
    item: str
    attr: str
    line: int = _position()
    column: int = _position()

    @property
    def dotted(self):
        return '.'.join(p for p in (self.scope, self.item, self.attr) if p)


@dataclass(frozen=True)
class Unary(object):
    op: str
    operand: object
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Binary(object):
    op: str
    left: object
    right: object
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Call(object):
    func: str
    args: tuple
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Compare(object):
    op: str
    left: object
    right: object
    line: int = _position()
    column: int = _position()


# statements

@dataclass(frozen=True)
class Classify(object):
    device: str
    kind: str
    reference: str = None
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Length(object):
    device: str
    expr: object
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Let(object):
    name: str
    expr: object
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class If(object):
    condition: Compare
    then: tuple
    orelse: tuple = ()
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class SizeIndependent(object):
    device: str
    current: object
    vov: object
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class SizeMirror(object):
    device: str
    reference: str
    current: object
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class SizeMatched(object):
    device: str
    partner: str
    line: int = _position()
    column: int = _position()


@dataclass(frozen=True)
class Set(object):
    scope: str
    name: str
    expr: object
    line: int = _position()
    column: int = _position()

    @property
    def dotted(self):
        return self.scope + '.' + self.name


@dataclass(frozen=True)
class Predict(object):
    metric: str
    expr: object
    line: int = _position()
    column: int = _position()


def references(expr):
    """Yield the Name and Accessor nodes of an expression, left to right."""
    if isinstance(expr, (Name, Accessor)):
        yield expr
    elif isinstance(expr, Unary):
        for ref in references(expr.operand):
            yield ref
    elif isinstance(expr, (Binary, Compare)):
        for side in (expr.left, expr.right):
            for ref in references(side):
                yield ref
    elif isinstance(expr, Call):
        for arg in expr.args:
            for ref in references(arg):
                yield ref


def walk_statements(statements):
    """Yield statements depth first, descending into both branches of if."""
    for stmt in statements:
        yield stmt
        if isinstance(stmt, If):
            for inner in walk_statements(stmt.then + stmt.orelse):
                yield inner
