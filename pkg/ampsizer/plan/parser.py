"""Tokenizer and recursive-descent parser for the plan DSL.

Statements end at newlines; ``#`` starts a comment.  Expressions use
``+ - * /`` and ``**`` (or ``^``) with the usual precedence, numbers may
carry SPICE unit suffixes (``0.5p``, ``20u``, ``100meg``).

"""
from dataclasses import dataclass
import re

from ampsizer.exceptions import PlanSyntaxError
from ampsizer.plan import INDEPENDENT, MATCHED, MIRROR, SizingPlan
from ampsizer.plan.nodes import (
    Accessor,
    Binary,
    Call,
    Classify,
    Compare,
    If,
    Length,
    Let,
    Name,
    Number,
    Predict,
    Set,
    SizeIndependent,
    SizeMatched,
    SizeMirror,
    Unary,
)
from ampsizer.plan.validation import structural_problems
from ampsizer.utils import parse_value

__all__ = [
    'FUNCTIONS',
    'CONSTANTS',
    'SCOPES',
    'PREDICTABLE',
    'tokenize',
    'parse_plan',
]

# name -> arity
FUNCTIONS = {
    'sqrt': 1,
    'abs': 1,
    'atan': 1,
    'tan': 1,
    'exp': 1,
    'log10': 1,
    'min': 2,
    'max': 2,
    'parallel': 2,
}
CONSTANTS = ('pi',)

# scope -> (has item, allowed attributes or None for any)
SCOPES = {
    'calib': (True, ('mu_cox', 'agm', 'lambda', 'vth', 'ro', 'id', 'vov',
                     'vds', 'gm', 'w', 'l', 'polarity')),
    'sized': (True, ('w', 'l', 'id', 'vov', 'gm', 'ro')),
    'target': (False, ('av', 'gbw', 'pm', 'sr_pos', 'sr_neg', 'sr',
                       'power', 'cl')),
    'supply': (False, ('vdd', 'vss', 'vcm')),
    'passive': (False, None),
    'source': (False, None),
    'bias': (False, None),
}
SET_SCOPES = ('passive', 'source', 'bias')
PREDICTABLE = ('av', 'gbw', 'pm', 'sr_pos', 'sr_neg', 'power')

KEYWORDS = frozenset((
    'plan', 'for', 'classify', 'independent', 'mirror', 'of', 'matched',
    'length', 'let', 'if', 'else', 'size', 'from', 'carrying', 'set',
    'predict'))
RESERVED = KEYWORDS | frozenset(FUNCTIONS) | frozenset(CONSTANTS) | \
    frozenset(SCOPES)

_COMPARISONS = ('>=', '<=', '==', '!=', '>', '<')
_TOKEN_RE = re.compile(r'''
    (?P<space>[ \t\r]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?
               (?:meg|[fpnumkgt])?(?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*\*|>=|<=|==|!=|[-+*/^(){},.=<>])
''', re.VERBOSE | re.IGNORECASE)
_HEADER_RE = re.compile(r'^\s*plan\s+(\S+)\s+for\s+(\S+)\s*$', re.IGNORECASE)


@dataclass(frozen=True)
class Token(object):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text):
    """Return the token list of a plan, NEWLINE after every line."""
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0]
        header = _HEADER_RE.match(line)
        if header:
            indent = len(line) - len(line.lstrip())
            tokens.append(Token('name', 'plan', lineno, indent + 1))
            tokens.append(Token('word', header.group(1), lineno,
                                header.start(1) + 1))
            keyword = line.lower().index('for', header.end(1))
            tokens.append(Token('name', 'for', lineno, keyword + 1))
            tokens.append(Token('word', header.group(2), lineno,
                                header.start(2) + 1))
        else:
            pos = 0
            while pos < len(line):
                match = _TOKEN_RE.match(line, pos)
                if match is None:
                    raise PlanSyntaxError(
                        "Unexpected character {0!r}".format(line[pos]),
                        lineno, pos + 1)
                kind = match.lastgroup
                if kind != 'space':
                    tokens.append(Token(kind, match.group(), lineno, pos + 1))
                pos = match.end()
        tokens.append(Token('newline', '\n', lineno, len(line) + 1))
    tokens.append(Token('eof', '', len(text.splitlines()) + 1, 1))
    return tokens


class _Parser(object):

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def error(self, msg, token=None):
        token = token or self.current
        return PlanSyntaxError(msg, token.line, token.column)

    def describe(self, token):
        if token.kind == 'newline':
            return 'end of line'
        if token.kind == 'eof':
            return 'end of plan'
        return repr(token.text)

    def advance(self):
        token = self.current
        self.pos += 1
        return token

    def at(self, kind, text=None):
        token = self.current
        if token.kind != kind:
            return False
        return text is None or token.text.lower() == text

    def accept(self, kind, text=None):
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind, text=None, what=None):
        token = self.accept(kind, text)
        if token is None:
            raise self.error("Expected {0}, got {1}".format(
                what or repr(text) if text else what or kind,
                self.describe(self.current)))
        return token

    def skip_newlines(self):
        while self.accept('newline'):
            pass

    def end_of_statement(self):
        if not (self.at('newline') or self.at('eof') or self.at('op', '}')):
            raise self.error("Unexpected {0} at end of statement".format(
                self.describe(self.current)))

    # program structure

    def parse(self, text):
        self.skip_newlines()
        if not self.at('name', 'plan') or \
                self.tokens[self.pos + 1].kind != 'word':
            raise self.error("A plan must start with 'plan <name> for "
                             "<topology>'")
        self.advance()
        name = self.expect('word', what='plan name').text
        self.expect('name', 'for')
        topology = self.expect('word', what='topology').text.upper()
        statements = []
        while True:
            self.skip_newlines()
            if self.at('eof'):
                break
            statements.append(self.statement())
            self.end_of_statement()
        return SizingPlan(name, topology, tuple(statements), text)

    def device(self):
        token = self.expect('name', what='device name')
        if token.text.lower() in KEYWORDS:
            raise self.error("Expected device name, got keyword {0!r}"
                             .format(token.text), token)
        return token.text.upper()

    def statement(self):
        token = self.current
        if token.kind != 'name':
            raise self.error("Expected a statement, got {0}".format(
                self.describe(token)))
        keyword = token.text.lower()
        handler = getattr(self, 'stmt_' + keyword, None)
        if keyword not in KEYWORDS or handler is None:
            raise self.error("Unknown statement {0!r}".format(token.text))
        self.advance()
        return handler(token)

    def stmt_classify(self, token):
        device = self.device()
        if self.accept('name', 'independent'):
            return Classify(device, INDEPENDENT, None,
                            token.line, token.column)
        if self.accept('name', 'mirror'):
            self.expect('name', 'of')
            return Classify(device, MIRROR, self.device(),
                            token.line, token.column)
        if self.accept('name', 'matched'):
            return Classify(device, MATCHED, self.device(),
                            token.line, token.column)
        raise self.error("Expected 'independent', 'mirror of' or 'matched'")

    def stmt_length(self, token):
        device = self.device()
        self.expect('op', '=')
        return Length(device, self.expression(), token.line, token.column)

    def stmt_let(self, token):
        name = self.expect('name', what='binding name')
        if name.text.lower() in RESERVED:
            raise self.error("{0!r} is reserved and cannot be bound"
                             .format(name.text), name)
        self.expect('op', '=')
        return Let(name.text, self.expression(), token.line, token.column)

    def block(self):
        self.expect('op', '{')
        statements = []
        while True:
            self.skip_newlines()
            if self.accept('op', '}'):
                return tuple(statements)
            if self.at('eof'):
                raise self.error("Unterminated block, expected '}'")
            inner = self.current
            if not (self.at('name', 'let') or self.at('name', 'if')):
                raise self.error("Only let and if statements may appear "
                                 "inside a conditional block", inner)
            statements.append(self.statement())
            self.end_of_statement()

    def stmt_if(self, token):
        condition = self.comparison()
        then = self.block()
        orelse = ()
        if self.accept('name', 'else'):
            if self.at('name', 'if'):
                nested = self.advance()
                orelse = (self.stmt_if(nested),)
            else:
                orelse = self.block()
        return If(condition, then, orelse, token.line, token.column)

    def stmt_size(self, token):
        if self.accept('name', 'independent'):
            device = self.device()
            args = {}
            while self.at('name') and self.current.text.lower() in (
                    'current', 'vov'):
                key = self.advance().text.lower()
                if key in args:
                    raise self.error("Duplicate argument {0!r}".format(key))
                self.expect('op', '=')
                args[key] = self.expression()
            for key in ('current', 'vov'):
                if key not in args:
                    raise self.error("size independent needs {0}=".format(
                        key))
            return SizeIndependent(device, args['current'], args['vov'],
                                   token.line, token.column)
        if self.accept('name', 'mirror'):
            device = self.device()
            self.expect('name', 'from')
            reference = self.device()
            self.expect('name', 'carrying')
            return SizeMirror(device, reference, self.expression(),
                              token.line, token.column)
        if self.accept('name', 'matched'):
            device = self.device()
            self.expect('name', 'from')
            return SizeMatched(device, self.device(),
                               token.line, token.column)
        raise self.error("Expected 'independent', 'mirror' or 'matched'")

    def stmt_set(self, token):
        scope = self.expect('name', what='passive, source or bias')
        if scope.text.lower() not in SET_SCOPES:
            raise self.error("Can only set passive, source or bias values",
                             scope)
        self.expect('op', '.')
        name = self.expect('name', what='name').text.upper()
        self.expect('op', '=')
        return Set(scope.text.lower(), name, self.expression(),
                   token.line, token.column)

    def stmt_predict(self, token):
        metric = self.expect('name', what='metric')
        if metric.text.lower() not in PREDICTABLE:
            raise self.error("Unknown metric {0!r}; expected one of {1}"
                             .format(metric.text, ', '.join(PREDICTABLE)),
                             metric)
        self.expect('op', '=')
        return Predict(metric.text.lower(), self.expression(),
                       token.line, token.column)

    # expressions

    def comparison(self):
        left = self.expression()
        token = self.current
        if token.kind != 'op' or token.text not in _COMPARISONS:
            raise self.error("Expected a comparison operator")
        self.advance()
        right = self.expression()
        return Compare(token.text, left, right, token.line, token.column)

    def expression(self):
        node = self.term()
        while self.at('op', '+') or self.at('op', '-'):
            op = self.advance()
            node = Binary(op.text, node, self.term(), op.line, op.column)
        return node

    def term(self):
        node = self.unary()
        while self.at('op', '*') or self.at('op', '/'):
            op = self.advance()
            node = Binary(op.text, node, self.unary(), op.line, op.column)
        return node

    def unary(self):
        if self.at('op', '-') or self.at('op', '+'):
            op = self.advance()
            return Unary(op.text, self.unary(), op.line, op.column)
        return self.power()

    def power(self):
        node = self.atom()
        if self.at('op', '**') or self.at('op', '^'):
            op = self.advance()
            node = Binary('**', node, self.unary(), op.line, op.column)
        return node

    def atom(self):
        token = self.current
        if self.accept('number'):
            return Number(parse_value(token.text), token.line, token.column)
        if self.accept('op', '('):
            node = self.expression()
            self.expect('op', ')')
            return node
        if self.accept('name'):
            word = token.text
            lowered = word.lower()
            if lowered in SCOPES:
                return self.accessor(token)
            if self.at('op', '('):
                return self.call(token)
            if lowered in CONSTANTS:
                return Name(lowered, token.line, token.column)
            if lowered in KEYWORDS:
                raise self.error("Unexpected keyword {0!r}".format(word),
                                 token)
            return Name(word, token.line, token.column)
        raise self.error("Expected an expression, got {0}".format(
            self.describe(token)))

    def call(self, token):
        func = token.text.lower()
        if func not in FUNCTIONS:
            raise self.error("Unknown function {0!r}".format(token.text),
                             token)
        self.expect('op', '(')
        args = []
        if not self.at('op', ')'):
            args.append(self.expression())
            while self.accept('op', ','):
                args.append(self.expression())
        self.expect('op', ')')
        if len(args) != FUNCTIONS[func]:
            raise self.error("{0}() takes {1} argument(s), got {2}".format(
                func, FUNCTIONS[func], len(args)), token)
        return Call(func, tuple(args), token.line, token.column)

    def accessor(self, token):
        scope = token.text.lower()
        has_item, allowed = SCOPES[scope]
        self.expect('op', '.')
        item = None
        if has_item:
            item = self.expect('name', what='device name').text.upper()
            self.expect('op', '.')
        attr = self.expect('name', what='attribute').text
        if allowed is None:
            attr = attr.upper()
        else:
            attr = attr.lower()
            if attr not in allowed:
                raise self.error("Unknown attribute {0}.{1}; expected one "
                                 "of {2}".format(scope, attr,
                                                 ', '.join(allowed)), token)
        return Accessor(scope, item, attr, token.line, token.column)


def parse_plan(text, check=True):
    """Parse plan text into a SizingPlan.

        text: plan source
        check: raise the first structural problem (circular reference,
            unclassified device, mirror length mismatch, ...); with False
            only syntax errors are raised and validate_plan reports the rest

    """
    plan = _Parser(tokenize(text)).parse(text)
    if check:
        problems = structural_problems(plan)
        if problems:
            raise problems[0]
    return plan
