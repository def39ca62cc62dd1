"""Utility functions used throughout ampsizer library."""
import json
import math
import re
from collections.abc import Mapping

__all__ = [
    'SUFFIXES',
    'parse_value',
    'format_value',
    'format_eng',
    'parallel',
    'ObjDict',
    'JSONEncoder',
    'dumps',
    'loads_float',
]

SUFFIXES = {
    'f': 1e-15,
    'p': 1e-12,
    'n': 1e-9,
    'u': 1e-6,
    'm': 1e-3,
    'k': 1e3,
    'meg': 1e6,
    'g': 1e9,
    't': 1e12,
}

_VALUE_RE = re.compile(
    r'^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(meg|[fpnumkgt])?$',
    re.IGNORECASE)


class ObjDict(dict):
    def __getattr__(self, name):
        if name not in self:
            raise AttributeError("No such attribute: " + name)
        return self[name]

    def __setattr__(self, name, value):
        self[name] = value

    def __delattr__(self, name):
        if name not in self:
            raise AttributeError("No such attribute: " + name)
        del self[name]

    def __getitem__(self, key):
        item = super(ObjDict, self).__getitem__(key)
        if isinstance(item, dict):
            return ObjDict(item)
        return item


def parse_value(text):
    """Parse a number with an optional SPICE unit suffix into SI units.

    '0.7u' -> 7e-07, '100meg' -> 1e8, '1p' -> 1e-12.  'm' is milli, as in
    SPICE; mega is spelled 'meg'.  Raises ValueError on anything else.

    """
    match = _VALUE_RE.match(text.strip())
    if match is None:
        raise ValueError("Invalid numeric value: {0!r}".format(text))
    number, suffix = match.groups()
    value = float(number)
    if suffix:
        value *= SUFFIXES[suffix.lower()]
    return value


def format_value(value):
    """Return the shortest text that parses back to exactly value."""
    return repr(float(value))


_ENGINEERING = ((1e12, 't'), (1e9, 'g'), (1e6, 'meg'), (1e3, 'k'),
                (1.0, ''), (1e-3, 'm'), (1e-6, 'u'), (1e-9, 'n'),
                (1e-12, 'p'), (1e-15, 'f'))


def format_eng(value, digits=5):
    """Engineering notation with a SPICE suffix, 3.14159e-4 -> '314.16u'."""
    value = float(value)
    if value == 0.0 or not math.isfinite(value):
        return '{0:g}'.format(value)
    for scale, suffix in _ENGINEERING:
        if abs(value) >= scale * (1.0 - 0.5 * 10.0 ** -digits):
            break
    return '{0:.{1}g}{2}'.format(value / scale, digits, suffix)


def parallel(a, b):
    """Parallel combination a*b/(a+b); infinite operands drop out."""
    if math.isinf(a):
        return b
    if math.isinf(b):
        return a
    return a * b / (a + b)


class JSONEncoder(json.JSONEncoder):
    """Encoder that calls the __json__ method of supporting objects.

    Non-finite floats are written as strings ("inf", "-inf", "nan") so the
    documents stay strict JSON.

    """

    def default(self, o):
        if hasattr(o, '__json__') and callable(o.__json__):
            return o.__json__()
        if isinstance(o, Mapping):
            return dict(o)
        if isinstance(o, (set, frozenset, tuple)):
            return list(o)
        return super(JSONEncoder, self).default(o)

    def iterencode(self, o, _one_shot=False):
        return super(JSONEncoder, self).iterencode(_finite(o), _one_shot)


def _finite(o):
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    if isinstance(o, Mapping):
        return dict((k, _finite(v)) for k, v in o.items())
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    if hasattr(o, '__json__') and callable(o.__json__):
        return _finite(o.__json__())
    return o


def dumps(obj):
    """Serialize obj to indented, key-sorted JSON."""
    return json.dumps(obj, cls=JSONEncoder, indent=2, sort_keys=True)


def loads_float(value):
    """Inverse of the non-finite encoding used by dumps."""
    if isinstance(value, str):
        return float(value)
    return value
