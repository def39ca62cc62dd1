"""Small-signal AC analysis and loop-gain metrics."""
from dataclasses import replace
import logging
import math

import numpy as np

from ampsizer.exceptions import (
    NoCrossingError,
    SimulationError,
    SingularMatrixError,
)
from ampsizer.netlist import GROUND, VOLTAGE_SOURCE, Instance
from ampsizer.simulator import FrequencyResponse, MetricSet, log_grid
from ampsizer.simulator.mna import MnaSystem

__all__ = [
    'PROBE_NODE',
    'PROBE_SOURCE',
    'ac_transfer',
    'response_metrics',
    'ac_loop_metrics',
]

log = logging.getLogger(__name__)

PROBE_NODE = 'LOOP_PROBE'
PROBE_SOURCE = 'VLOOP_PROBE'


def _sweep(G, C, b, freqs):
    """Solve (G + j*2*pi*f*C) x = b for every f; returns shape (nf, n)."""
    omegas = 2.0 * np.pi * np.asarray(freqs, dtype=float)
    A = G[np.newaxis, :, :] + 1j * omegas[:, np.newaxis, np.newaxis] * C
    rhs = np.broadcast_to(b.astype(complex), (len(omegas), len(b)))
    try:
        return np.linalg.solve(A, rhs[..., np.newaxis])[..., 0]
    except np.linalg.LinAlgError:
        raise SingularMatrixError("The small-signal matrix is singular.")


def ac_transfer(net, op, source, node, freqs):
    """Transfer from a unit AC value of source to the voltage at node.

    All other independent sources are zeroed; the circuit is linearized at
    op with device capacitances taken from op.

    """
    system = MnaSystem(net)
    index = system.index(node.upper())
    if index is None:
        raise SimulationError("Cannot observe the ground node.")
    X = _sweep(system.conductance(op), system.capacitance(op),
               system.excitation(source), freqs)
    return FrequencyResponse(freqs, X[:, index])


def _normalize_degrees(angle):
    """Map an angle to (-180, 180]."""
    angle = math.fmod(angle, 360.0)
    if angle <= -180.0:
        angle += 360.0
    elif angle > 180.0:
        angle -= 360.0
    return angle


def response_metrics(response):
    """(av_db, gbw_hz, pm_deg) of a loop-gain response.

    av_db is taken at the first grid frequency, the crossing is the first
    point where the magnitude falls through 1, interpolated on log-log axes,
    and the phase there is interpolated linearly in log frequency.

    """
    freqs, mag = response.freqs, np.abs(response.values)
    f_start, f_stop = float(freqs[0]), float(freqs[-1])
    av_db = 20.0 * math.log10(mag[0]) if mag[0] > 0.0 else -math.inf
    if mag[0] < 1.0:
        raise NoCrossingError("Loop gain is below unity at the start of "
                              "the sweep.", f_start, f_stop)
    below = np.nonzero(mag < 1.0)[0]
    if not len(below):
        raise NoCrossingError(f_start=f_start, f_stop=f_stop)
    i = int(below[0]) - 1
    lm0, lm1 = math.log(mag[i]), math.log(mag[i + 1])
    lf0, lf1 = math.log(freqs[i]), math.log(freqs[i + 1])
    t = lm0 / (lm0 - lm1)
    gbw = math.exp(lf0 + t * (lf1 - lf0))
    phase = response.phase_deg
    crossing_phase = phase[i] + t * (phase[i + 1] - phase[i])
    pm = _normalize_degrees(180.0 + float(crossing_phase))
    return av_db, gbw, pm


def _open_loop(net, output_node, output_voltage):
    """Netlist with feedback gates moved to a probe source."""
    cut = [m for m in net.mosfets if m.gate == output_node]
    if not cut:
        raise SimulationError(
            "No MOSFET gate is tied to output node {0}; the feedback loop "
            "cannot be opened.".format(output_node))
    names = set(m.name for m in cut)
    instances = []
    for inst in net.instances:
        if inst.name in names:
            d, _, s, b = inst.terminals
            inst = replace(inst, terminals=(d, PROBE_NODE, s, b))
        instances.append(inst)
    instances.append(Instance(PROBE_SOURCE, VOLTAGE_SOURCE,
                              (PROBE_NODE, GROUND), value=output_voltage))
    return replace(net, instances=tuple(instances)), sorted(names)


def ac_loop_metrics(net, op, tb):
    """Loop gain of a unity-gain configured amplifier.

    Every MOSFET whose gate is the output node has its transconductance
    driven by a unit probe instead, while its gate capacitances stay on the
    output node.  The loop gain is -v(out)/v(probe).

        net: unity-gain netlist the operating point was solved on
        op: OperatingPoint
        tb: TestbenchConfig

    Returns (MetricSet with av_db, gbw_hz and pm_deg, FrequencyResponse).

    """
    out = tb.output_node.upper()
    probe_net, cut = _open_loop(net, out, op.voltage(out))
    log.debug("%s: loop opened at gates of %s", net.name, ', '.join(cut))
    system = MnaSystem(probe_net)
    freqs = log_grid(tb.f_start, tb.f_stop, tb.points_per_decade)
    C = system.capacitance(op, gate_nodes=dict((name, out) for name in cut))
    X = _sweep(system.conductance(op), C, system.excitation(PROBE_SOURCE),
               freqs)
    response = FrequencyResponse(freqs, -X[:, system.index(out)])
    av_db, gbw_hz, pm_deg = response_metrics(response)
    return MetricSet(av_db=av_db, gbw_hz=gbw_hz, pm_deg=pm_deg), response
