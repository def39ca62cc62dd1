"""Prompt assembly for the HTTP provider.

Rule texts are data: plain-text assets under ``rules/<version>/``, loaded
by RuleSet.  ``ampsizer.prompt.build`` puts them together with the netlist,
targets and feedback of a round.

"""
from dataclasses import dataclass
import os
import re
import warnings

from ampsizer.exceptions import PromptAssemblyError

__all__ = [
    'DEFAULT_VERSION',
    'PromptBundle',
    'RuleSet',
    'get_default_rules',
]

DEFAULT_VERSION = 'v1'

_VERSION_RE = re.compile(r'^v(\d+)$')

_DEFAULT_RULES = None


@dataclass(frozen=True)
class PromptBundle(object):
    """Prompt text with named spans.

        text: full prompt
        sections: (name, start, end) spans, in order, covering text

    """
    text: str
    sections: tuple

    @property
    def names(self):
        return [name for name, _, _ in self.sections]

    def section(self, name):
        """Text of the first span with this name."""
        for span, start, end in self.sections:
            if span == name:
                return self.text[start:end]
        raise KeyError(name)

    def __str__(self):
        return self.text


class RuleSet(object):
    """Versioned rule assets.

        version: wanted asset version, 'v1'
        directory: directory holding the version directories, the shipped
            rules when None

    """

    @staticmethod
    def _get_rules_directory():
        """Return the directory of the shipped rules."""
        return os.path.join(os.path.dirname(__file__), 'rules')

    def __init__(self, version=DEFAULT_VERSION, directory=None):
        self.directory = directory or self._get_rules_directory()
        self._wanted_version = version
        self.version = self._get_version()
        self._rules = self._load()

    def _get_available_versions(self):
        if not os.path.isdir(self.directory):
            return []
        return [d for d in os.listdir(self.directory)
                if _VERSION_RE.match(d) and
                os.path.isdir(os.path.join(self.directory, d))]

    def _get_version(self):
        """Return the wanted version or the latest one if not available."""
        available = self._get_available_versions()
        if not available:
            raise PromptAssemblyError(
                "No rule assets found in {0}".format(self.directory))
        if self._wanted_version in available:
            return self._wanted_version
        latest = max(available, key=lambda v: int(_VERSION_RE.match(v)
                                                   .group(1)))
        warnings.warn(
            "Rule set %s is not available. Using the latest version "
            "instead: %s" % (self._wanted_version, latest))
        return latest

    def _load(self):
        path = os.path.join(self.directory, self.version)
        rules = {}
        for name in sorted(os.listdir(path)):
            if name.endswith('.txt'):
                with open(os.path.join(path, name), encoding='utf-8') as f:
                    rules[name[:-len('.txt')]] = f.read()
        return rules

    @property
    def names(self):
        return sorted(self._rules)

    def __contains__(self, name):
        return name in self._rules

    def get(self, name):
        """Text of a rule asset; missing or empty assets are an error."""
        text = self._rules.get(name)
        if text is None or not text.strip():
            raise PromptAssemblyError(
                "Rule asset {0!r} of rule set {1} is missing or empty".format(
                    name, self.version))
        return text.strip() + '\n'


def get_default_rules():
    """Return the shipped rule set, loading it on first use."""
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = RuleSet()
    return _DEFAULT_RULES
