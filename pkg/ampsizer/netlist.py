"""SPICE-subset netlists.

The grammar is line oriented::

    .title 2SMC-N
    * comment
    M1 n1 out tail vss NMOS W=0.7u L=0.2u
    + ; continuation lines start with '+'
    R1 a b 1k
    C1 out 0 1p
    IREF vdd nbias DC 10u
    VDD vdd 0 DC 0.9
    .end

Identifiers are case-insensitive and normalized to upper case.  Values are
stored in SI units.  Voltage sources named ``VDD*``/``VSS*`` are the rails.

"""
from dataclasses import dataclass, field, replace
import re

from ampsizer.exceptions import (
    ArityError,
    DesignVariableError,
    DuplicateInstanceError,
    NetlistError,
    NetlistSyntaxError,
    UnknownDeviceError,
)
from ampsizer.utils import format_value, parse_value

__all__ = [
    'GROUND',
    'MOSFET',
    'RESISTOR',
    'CAPACITOR',
    'CURRENT_SOURCE',
    'VOLTAGE_SOURCE',
    'Instance',
    'Netlist',
    'DesignVariables',
    'parse_netlist',
    'load_netlist',
    'serialize_netlist',
    'apply_design_variables',
]

GROUND = '0'
_GROUND_ALIASES = ('0', 'GND')

MOSFET = 'M'
RESISTOR = 'R'
CAPACITOR = 'C'
CURRENT_SOURCE = 'I'
VOLTAGE_SOURCE = 'V'

MOS_MODELS = ('NMOS', 'PMOS')
_KIND_NAMES = {
    MOSFET: 'Mosfet',
    RESISTOR: 'Resistor',
    CAPACITOR: 'Capacitor',
    CURRENT_SOURCE: 'CurrentSourceDC',
    VOLTAGE_SOURCE: 'VoltageSourceDC',
}
_TOKEN_RE = re.compile(r'\S+')


@dataclass(frozen=True)
class Instance(object):
    """One circuit element.

        name: upper-case instance name, its first letter is the kind
        kind: one of MOSFET, RESISTOR, CAPACITOR, CURRENT_SOURCE,
            VOLTAGE_SOURCE
        terminals: node names (d, g, s, b for a MOSFET; n+, n- otherwise)
        value: ohms, farads, amperes or volts for two-terminal elements
        model: 'NMOS' or 'PMOS' for a MOSFET
        w, l: MOSFET geometry in meters

    """
    name: str
    kind: str
    terminals: tuple
    value: float = None
    model: str = None
    w: float = None
    l: float = None

    @property
    def is_mosfet(self):
        return self.kind == MOSFET

    @property
    def kind_name(self):
        return _KIND_NAMES[self.kind]

    @property
    def drain(self):
        return self.terminals[0]

    @property
    def gate(self):
        return self.terminals[1]

    @property
    def source(self):
        return self.terminals[2]

    @property
    def bulk(self):
        return self.terminals[3]

    def serialize(self):
        parts = [self.name] + list(self.terminals)
        if self.is_mosfet:
            parts += [self.model, 'W=' + format_value(self.w),
                      'L=' + format_value(self.l)]
        elif self.kind in (CURRENT_SOURCE, VOLTAGE_SOURCE):
            parts += ['DC', format_value(self.value)]
        else:
            parts.append(format_value(self.value))
        return ' '.join(parts)


@dataclass(frozen=True)
class Netlist(object):
    name: str
    instances: tuple

    @property
    def nodes(self):
        """Ordered node names, ground first."""
        seen = [GROUND]
        for inst in self.instances:
            for node in inst.terminals:
                if node not in seen:
                    seen.append(node)
        return tuple(seen)

    @property
    def mosfets(self):
        return tuple(i for i in self.instances if i.is_mosfet)

    @property
    def supplies(self):
        """Rail voltages by source name."""
        return dict(
            (i.name, i.value) for i in self.instances
            if i.kind == VOLTAGE_SOURCE and i.name.startswith(('VDD', 'VSS')))

    @property
    def topology(self):
        """Topology family from the title, '2SMC-N' -> '2SMC'."""
        family, sep, suffix = self.name.rpartition('-')
        if sep and suffix in ('N', 'P'):
            return family
        return self.name

    @property
    def polarity(self):
        """Input polarity from the title, 'N', 'P' or None."""
        family, sep, suffix = self.name.rpartition('-')
        if sep and suffix in ('N', 'P'):
            return suffix
        return None

    def get(self, name):
        name = name.upper()
        for inst in self.instances:
            if inst.name == name:
                return inst
        raise UnknownDeviceError(name)

    def __contains__(self, name):
        return any(i.name == name.upper() for i in self.instances)

    def with_values(self, values):
        """Return a copy with source/passive values replaced by name."""
        values = dict((k.upper(), v) for k, v in values.items())
        for name in values:
            if name not in self:
                raise UnknownDeviceError(name)
        instances = tuple(
            replace(i, value=float(values[i.name]))
            if i.name in values and not i.is_mosfet else i
            for i in self.instances)
        return replace(self, instances=instances)

    def serialize(self):
        return serialize_netlist(self)


@dataclass
class DesignVariables(object):
    """Sizing outputs of a plan: geometry, passives and bias currents.

    Bias currents whose name matches a source instance are applied to the
    netlist; the others (tail current, second-stage current, ...) are plan
    bookkeeping.

    """
    widths: dict = field(default_factory=dict)
    lengths: dict = field(default_factory=dict)
    passives: dict = field(default_factory=dict)
    bias_currents: dict = field(default_factory=dict)

    def __json__(self):
        return {
            'widths': dict(self.widths),
            'lengths': dict(self.lengths),
            'passives': dict(self.passives),
            'bias_currents': dict(self.bias_currents),
        }

    @classmethod
    def from_json(cls, data):
        return cls(**dict((k, dict(data.get(k, {}))) for k in (
            'widths', 'lengths', 'passives', 'bias_currents')))


def _logical_lines(text):
    """Yield (line number, [(column, token), ...]) with continuations joined."""
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(';', 1)[0]
        stripped = line.strip()
        if not stripped or stripped.startswith('*'):
            continue
        tokens = [(m.start() + 1, m.group()) for m in _TOKEN_RE.finditer(line)]
        if stripped.startswith('+'):
            if current is None:
                raise NetlistSyntaxError(
                    "Continuation line without a preceding line",
                    lineno, tokens[0][0])
            col, first = tokens[0]
            rest = first[1:]
            if rest:
                tokens[0] = (col + 1, rest)
            else:
                tokens = tokens[1:]
            current[1].extend(tokens)
            continue
        if current is not None:
            yield current
        current = (lineno, tokens)
    if current is not None:
        yield current


def _node(token):
    name = token.upper()
    return GROUND if name in _GROUND_ALIASES else name


def _value(lineno, col, token):
    try:
        return parse_value(token)
    except ValueError:
        raise NetlistSyntaxError(
            "Invalid value {0!r}".format(token), lineno, col)


def _parse_mosfet(name, lineno, tokens):
    terminals, rest = [], list(tokens)
    while rest and '=' not in rest[0][1] and \
            rest[0][1].upper() not in MOS_MODELS:
        terminals.append(rest.pop(0))
    if len(terminals) != 4:
        col = terminals[0][0] if terminals else 1
        raise ArityError(
            "{0} expects 4 terminals (d g s b), got {1}".format(
                name, len(terminals)), lineno, col)
    if not rest or rest[0][1].upper() not in MOS_MODELS:
        raise NetlistSyntaxError(
            "{0} needs a model name NMOS or PMOS".format(name),
            lineno, rest[0][0] if rest else terminals[-1][0])
    model = rest.pop(0)[1].upper()
    params = {}
    for col, token in rest:
        key, sep, value = token.partition('=')
        key = key.upper()
        if not sep or key not in ('W', 'L'):
            raise NetlistSyntaxError(
                "Unsupported MOSFET parameter {0!r}".format(token), lineno, col)
        params[key] = _value(lineno, col + len(key) + 1, value)
    for key in ('W', 'L'):
        if params.get(key, 0.0) <= 0.0:
            raise NetlistSyntaxError(
                "{0} needs {1} > 0".format(name, key), lineno, tokens[0][0])
    return Instance(name, MOSFET, tuple(_node(t) for _, t in terminals),
                    model=model, w=params['W'], l=params['L'])


def _parse_two_terminal(name, kind, lineno, tokens):
    rest = list(tokens)
    if kind in (CURRENT_SOURCE, VOLTAGE_SOURCE) and len(rest) == 4 and \
            rest[2][1].upper() == 'DC':
        del rest[2]
    if len(rest) != 3:
        raise ArityError(
            "{0} expects 2 terminals and a value".format(name),
            lineno, rest[0][0] if rest else 1)
    (_, a), (_, b), (col, token) = rest
    value = _value(lineno, col, token)
    if kind in (RESISTOR, CAPACITOR) and value <= 0.0:
        raise NetlistSyntaxError(
            "{0} needs a positive value".format(name), lineno, col)
    return Instance(name, kind, (_node(a), _node(b)), value=value)


def parse_netlist(text, name=None):
    """Parse netlist text into a Netlist.

        text: netlist source
        name: title to use when the text has no .title line

    """
    if not text or not text.strip():
        raise NetlistSyntaxError("Empty netlist", 1, 1)
    title = None
    instances = []
    names = set()
    for lineno, tokens in _logical_lines(text):
        col, head = tokens[0]
        upper = head.upper()
        if upper.startswith('.'):
            if upper == '.TITLE':
                title = ' '.join(t for _, t in tokens[1:]).upper()
                continue
            if upper == '.END':
                break
            raise NetlistSyntaxError(
                "Unsupported directive {0}".format(head), lineno, col)
        kind = upper[0]
        if kind not in _KIND_NAMES:
            raise NetlistSyntaxError(
                "Unknown device prefix {0!r}".format(head[0]), lineno, col)
        if upper in names:
            raise DuplicateInstanceError(
                "Duplicate instance name {0}".format(upper), lineno, col)
        names.add(upper)
        if kind == MOSFET:
            inst = _parse_mosfet(upper, lineno, tokens[1:])
        else:
            inst = _parse_two_terminal(upper, kind, lineno, tokens[1:])
        instances.append(inst)
    net = Netlist((title or name or 'UNTITLED').upper(), tuple(instances))
    if GROUND not in net.nodes[1:] and \
            not any(GROUND in i.terminals for i in instances):
        raise NetlistError("Netlist has no ground node '0'.")
    return net


def load_netlist(path):
    with open(path) as f:
        text = f.read()
    stem = re.sub(r'\.[^.]*$', '', path.replace('\\', '/').rsplit('/', 1)[-1])
    return parse_netlist(text, name=stem)


def serialize_netlist(net):
    """One instance per line, in original order."""
    lines = ['.title ' + net.name]
    lines.extend(inst.serialize() for inst in net.instances)
    lines.append('.end')
    return '\n'.join(lines) + '\n'


def _positive(kind, name, value):
    if not value > 0.0:
        raise DesignVariableError(
            "{0} of {1} must be positive, got {2!r}".format(kind, name, value))
    return float(value)


def apply_design_variables(net, dv):
    """Return net with the plan's W/L, passive and source values applied."""
    updates = {}

    def lookup(name, kinds):
        name = name.upper()
        inst = net.get(name)
        if inst.kind not in kinds:
            raise UnknownDeviceError(name)
        return updates.get(name, inst)

    for name, w in dv.widths.items():
        inst = lookup(name, (MOSFET,))
        updates[inst.name] = replace(inst, w=_positive('W', name, w))
    for name, l in dv.lengths.items():
        inst = lookup(name, (MOSFET,))
        updates[inst.name] = replace(inst, l=_positive('L', name, l))
    for name, value in dv.passives.items():
        inst = lookup(name, (RESISTOR, CAPACITOR))
        updates[inst.name] = replace(
            inst, value=_positive('value', name, value))
    for name, value in dv.bias_currents.items():
        if name.upper() not in net:
            continue
        inst = lookup(name, (CURRENT_SOURCE, VOLTAGE_SOURCE))
        updates[inst.name] = replace(
            inst, value=_positive('value', name, value))
    instances = tuple(updates.get(i.name, i) for i in net.instances)
    return replace(net, instances=instances)
