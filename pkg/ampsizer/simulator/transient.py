"""Backward-Euler transient analysis and slew-rate measurement."""
from dataclasses import dataclass
import logging
import math
import warnings

import numpy as np

from ampsizer.exceptions import (
    ConvergenceError,
    SimulationError,
    TransientError,
)
from ampsizer.simulator.dc import dc_operating_point, newton
from ampsizer.simulator.mna import MnaSystem

__all__ = [
    'Waveform',
    'run_transient',
    'slope_in_window',
    'transient_slew',
]

log = logging.getLogger(__name__)


@dataclass
class Waveform(object):
    times: np.ndarray
    values: np.ndarray


def run_transient(net, card, initial, dt, t_stop, node, until=None):
    """Integrate net forward from the state of an operating point.

        net: netlist holding the source values that apply for t > 0
        card: ProcessCard
        initial: OperatingPoint at t = 0
        dt: fixed timestep in seconds
        t_stop: horizon in seconds
        node: node to record
        until: optional predicate on the recorded voltage ending the run

    Device capacitances are frozen at their values in initial.

    """
    if dt <= 0.0 or t_stop <= 0.0:
        raise SimulationError("Transient timestep and horizon must be "
                              "positive.")
    system = MnaSystem(net, card)
    index = system.index(node.upper())
    C_dt = system.capacitance(initial) / dt
    x = system.state_vector(initial)
    times, values = [0.0], [float(x[index])]
    steps = int(math.ceil(t_stop / dt - 1e-9))
    for step in range(1, steps + 1):
        t = step * dt
        previous = x

        def fun(state):
            F, J, _ = system.residual(state)
            return F + C_dt.dot(state - previous), J + C_dt

        try:
            x, _, _ = newton(fun, previous, system.node_count)
        except (ConvergenceError, np.linalg.LinAlgError):
            raise TransientError(time=t)
        times.append(t)
        values.append(float(x[index]))
        if until is not None and until(values[-1]):
            break
    return Waveform(np.array(times), np.array(values))


def slope_in_window(wave, v_start, v_end):
    """Largest slope magnitude between the 10 % and 90 % levels.

    Only sample pairs whose segment overlaps the window contribute.  The
    slope is taken in the direction of the transition, so ringing against
    it never counts.

    """
    span = v_end - v_start
    if span == 0.0 or len(wave.times) < 2:
        return 0.0
    sign = 1.0 if span > 0.0 else -1.0
    u = (wave.values - v_start) * sign
    lo, hi = 0.1 * abs(span), 0.9 * abs(span)
    seg_lo = np.minimum(u[:-1], u[1:])
    seg_hi = np.maximum(u[:-1], u[1:])
    mask = (seg_hi >= lo) & (seg_lo <= hi)
    if not np.any(mask):
        return 0.0
    slopes = np.diff(u) / np.diff(wave.times)
    return max(0.0, float(np.max(slopes[mask])))


def _step_response(net, card, initial, v_start, v_end, tb):
    span = v_end - v_start
    target = v_start + 0.9 * span

    def reached(v):
        return (v - target) * span >= 0.0

    dt = 1.0 / (tb.gbw_hz * tb.steps_per_period)
    t_stop = tb.horizon_periods / tb.gbw_hz
    wave = run_transient(net, card, initial, dt, t_stop, tb.output_node,
                         until=reached)
    if not reached(wave.values[-1]):
        log.warning("%s: output did not reach 90%% of the step within "
                    "%.3g s", net.name, t_stop)
    return slope_in_window(wave, v_start, v_end)


def rail_span(net):
    rails = list(net.supplies.values()) + [0.0]
    return max(rails) - min(rails)


def transient_slew(net, card, tb):
    """(sr_pos, sr_neg) in V/s from a large-signal step of the input source.

    The input source is stepped between base - A/2 and base + A/2 with the
    DC operating points at both levels as the transition end points.

    """
    source = net.get(tb.input_source)
    amplitude = tb.step_amplitude
    if amplitude is None:
        amplitude = 0.4 * rail_span(net)
    if amplitude == 0.0:
        warnings.warn("Slew step amplitude is zero; reporting zero slew "
                      "rate.")
        return 0.0, 0.0
    low_net = net.with_values({source.name: source.value - amplitude / 2.0})
    high_net = net.with_values({source.name: source.value + amplitude / 2.0})
    low = dc_operating_point(low_net, card)
    high = dc_operating_point(high_net, card)
    v_low = low.voltage(tb.output_node)
    v_high = high.voltage(tb.output_node)
    sr_pos = _step_response(high_net, card, low, v_low, v_high, tb)
    sr_neg = _step_response(low_net, card, high, v_high, v_low, tb)
    log.debug("%s: SR+ %.4g V/s, SR- %.4g V/s", net.name, sr_pos, sr_neg)
    return sr_pos, sr_neg
