"""Adapter interface for simulators outside the library.

An external simulator takes a netlist file and returns the same operating
point and metric documents the built-in testbench writes (``op.json`` and
``metrics.json`` layouts).  No driver for a commercial simulator ships;
``ResultFileSimulator`` reads results an outside run left next to the
netlist.

"""
import json
import os

from ampsizer.exceptions import SimulationError
from ampsizer.simulator import MetricSet, OperatingPoint

__all__ = [
    'ExternalSimulator',
    'ResultFileSimulator',
    'read_result',
]


class ExternalSimulator(object):
    """Abstract class for an outside simulator."""

    def simulate(self, netlist_path, tb):
        """Return (OperatingPoint, MetricSet) for the netlist file."""
        raise NotImplementedError


def read_result(path):
    """Parse a result document ``{"op": {...}, "metrics": {...}}``."""
    try:
        with open(path) as f:
            data = json.load(f)
        return (OperatingPoint.from_json(data['op']),
                MetricSet.from_json(data['metrics']))
    except (IOError, OSError, ValueError, KeyError, TypeError,
            AttributeError) as exc:
        raise SimulationError(
            "Unreadable simulator result {0}: {1}".format(path, exc))


class ResultFileSimulator(ExternalSimulator):
    """Reads ``<netlist stem><suffix>`` produced by an outside run."""

    def __init__(self, suffix='.result.json'):
        self.suffix = suffix

    def simulate(self, netlist_path, tb=None):
        path = os.path.splitext(netlist_path)[0] + self.suffix
        if not os.path.isfile(path):
            raise SimulationError(
                "No simulator result for {0} at {1}".format(
                    netlist_path, path))
        return read_result(path)
