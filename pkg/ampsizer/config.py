"""Flat key-value configuration files.

Process cards, design targets and campaign settings all share one format::

    # comment
    name = T180-toy
    nmos.mu0cox = 300u
    nmos.vth0 = 0.45

Dotted keys group values; numbers may carry SPICE unit suffixes.  Keys are
case-insensitive and stored lower case.

"""
import io
import os

from ampsizer.exceptions import ConfigError
from ampsizer.utils import ObjDict, parse_value

__all__ = [
    'parse_config',
    'load_config',
    'flatten',
    'get_number',
]


def _coerce(text):
    try:
        return parse_value(text)
    except ValueError:
        pass
    lowered = text.lower()
    if lowered in ('true', 'yes', 'on'):
        return True
    if lowered in ('false', 'no', 'off'):
        return False
    return text


def parse_config(text, source='<config>'):
    """Parse configuration text into a nested ObjDict."""
    data = ObjDict()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError("{0}:{1}: expected 'key = value', got {2!r}"
                              .format(source, lineno, raw.strip()))
        key, value = (part.strip() for part in line.split('=', 1))
        if not key:
            raise ConfigError("{0}:{1}: empty key".format(source, lineno))
        parts = key.lower().split('.')
        node = data
        for part in parts[:-1]:
            child = dict.get(node, part)
            if child is None:
                child = ObjDict()
                dict.__setitem__(node, part, child)
            elif not isinstance(child, dict):
                raise ConfigError("{0}:{1}: {2!r} is both a value and a group"
                                  .format(source, lineno, part))
            node = child
        if isinstance(dict.get(node, parts[-1]), dict):
            raise ConfigError("{0}:{1}: {2!r} is both a value and a group"
                              .format(source, lineno, key))
        dict.__setitem__(node, parts[-1], _coerce(value))
    return data


def load_config(path):
    """Read and parse a configuration file."""
    if not os.path.isfile(path):
        raise ConfigError("Configuration file not found: {0}".format(path))
    with io.open(path, encoding='utf-8') as f:
        return parse_config(f.read(), source=path)


def flatten(data, prefix=''):
    """Return the dotted-key form of a nested mapping."""
    flat = {}
    for key, value in dict.items(data):
        name = prefix + key
        if isinstance(value, dict):
            flat.update(flatten(value, name + '.'))
        else:
            flat[name] = value
    return flat


def get_number(data, key, default=None, required=False):
    """Look up a dotted key and make sure it holds a number."""
    node = data
    for part in key.split('.'):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError("Missing configuration key: {0}".format(key))
            return default
        node = dict.__getitem__(node, part)
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError("Configuration key {0} must be numeric, got {1!r}"
                          .format(key, node))
    return float(node)
