"""Unity-gain testbench: every metric of one sized netlist."""
from dataclasses import replace
import logging

from ampsizer.simulator.ac import ac_loop_metrics
from ampsizer.simulator.dc import dc_operating_point, power
from ampsizer.simulator.transient import transient_slew

__all__ = ['simulate']

log = logging.getLogger(__name__)


def simulate(net, card, tb):
    """Run DC, AC and transient analyses.

    Returns (OperatingPoint, MetricSet, FrequencyResponse).  Any
    SimulationError aborts the whole measurement.

    """
    op = dc_operating_point(net, card)
    metrics, response = ac_loop_metrics(net, op, tb)
    sr_pos, sr_neg = transient_slew(net, card, tb)
    metrics = replace(metrics, sr_pos=sr_pos, sr_neg=sr_neg,
                      power_w=power(op, net.supplies))
    log.info("%s: Av %.2f dB, GBW %.4g Hz, PM %.2f deg, SR+ %.4g V/s, "
             "SR- %.4g V/s, P %.4g W", net.name, metrics.av_db,
             metrics.gbw_hz, metrics.pm_deg, metrics.sr_pos, metrics.sr_neg,
             metrics.power_w)
    return op, metrics, response
