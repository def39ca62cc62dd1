"""Circuit simulation: DC operating point, AC loop gain and transient slew.

The value types shared by the analyses live here; the analyses themselves
are in the submodules:

    ampsizer.simulator.mna        system assembly (residual, Jacobian, C)
    ampsizer.simulator.dc         Newton operating point and power
    ampsizer.simulator.ac         small-signal sweeps and loop metrics
    ampsizer.simulator.transient  backward-Euler transient and slew rate
    ampsizer.simulator.bench      full testbench run of one netlist
    ampsizer.simulator.external   adapter interface for outside simulators

"""
from dataclasses import dataclass, field, fields
import math

import numpy as np

from ampsizer.config import get_number
from ampsizer.utils import loads_float

__all__ = [
    'METRICS',
    'TestbenchConfig',
    'DeviceOP',
    'OperatingPoint',
    'MetricSet',
    'FrequencyResponse',
    'log_grid',
]

# short metric name -> MetricSet attribute
METRICS = (
    ('av', 'av_db'),
    ('gbw', 'gbw_hz'),
    ('pm', 'pm_deg'),
    ('sr_pos', 'sr_pos'),
    ('sr_neg', 'sr_neg'),
    ('power', 'power_w'),
)


@dataclass(frozen=True)
class TestbenchConfig(object):
    """Unity-gain testbench settings.

        output_node: amplifier output, fed back to the inverting input
        input_source: DC source on the non-inverting input, stepped for slew
        f_start, f_stop: AC sweep bounds in Hz
        points_per_decade: AC sweep density
        step_amplitude: slew step in volts, None for 0.4 * (Vdd - Vss)
        gbw_hz: GBW the transient timestep is scaled to
        steps_per_period: timesteps per 1/gbw_hz
        horizon_periods: transient horizon in units of 1/gbw_hz

    """
    __test__ = False

    output_node: str = 'OUT'
    input_source: str = 'VIN'
    f_start: float = 1.0
    f_stop: float = 1e11
    points_per_decade: int = 40
    step_amplitude: float = None
    gbw_hz: float = 100e6
    steps_per_period: int = 200
    horizon_periods: float = 50.0

    @classmethod
    def from_config(cls, data):
        """Read the ``tb.*`` keys of a parsed config."""
        tb = data.get('tb') or {}
        values = {}
        for name in ('output_node', 'input_source'):
            if name in tb:
                values[name] = str(tb[name]).upper()
        for f in fields(cls):
            if f.name in values or f.name not in tb:
                continue
            value = get_number(data, 'tb.' + f.name)
            values[f.name] = int(value) if f.type is int else value
        return cls(**values)

    def __json__(self):
        return dict((f.name, getattr(self, f.name)) for f in fields(self))


@dataclass(frozen=True)
class DeviceOP(object):
    """Solved bias of one MOSFET.

    Terminal voltages are in the external frame; the remaining fields are
    those of the DeviceEval at that bias (see ampsizer.device).

    """
    model: str
    w: float
    l: float
    vgs: float
    vds: float
    vsb: float
    id: float
    gm: float
    gds: float
    gmb: float
    vth: float
    vov: float
    region: str
    cgs: float = 0.0
    cgd: float = 0.0
    cdb: float = 0.0
    csb: float = 0.0
    reverse: bool = False

    def partials(self):
        if self.reverse:
            return -self.gm, self.gm + self.gds + self.gmb, self.gmb
        return self.gm, self.gds, -self.gmb

    def __json__(self):
        return dict((f.name, getattr(self, f.name)) for f in fields(self))

    @classmethod
    def from_json(cls, data):
        values = {}
        for f in fields(cls):
            if f.name in data:
                value = data[f.name]
                values[f.name] = value if f.type in (str, bool) \
                    else loads_float(value)
        return cls(**values)


@dataclass(frozen=True)
class OperatingPoint(object):
    node_voltages: dict
    device_ops: dict
    supply_currents: dict
    residual: float = 0.0

    def voltage(self, node):
        return self.node_voltages[node.upper()]

    def __json__(self):
        return {
            'node_voltages': dict(self.node_voltages),
            'device_ops': dict(
                (k, v.__json__()) for k, v in self.device_ops.items()),
            'supply_currents': dict(self.supply_currents),
            'residual': self.residual,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            node_voltages=dict(
                (k, loads_float(v))
                for k, v in data.get('node_voltages', {}).items()),
            device_ops=dict(
                (k, DeviceOP.from_json(v))
                for k, v in data.get('device_ops', {}).items()),
            supply_currents=dict(
                (k, loads_float(v))
                for k, v in data.get('supply_currents', {}).items()),
            residual=loads_float(data.get('residual', 0.0)),
        )


@dataclass
class MetricSet(object):
    """Amplifier performance in SI units (dB, Hz, degrees, V/s, W)."""
    av_db: float = None
    gbw_hz: float = None
    pm_deg: float = None
    sr_pos: float = None
    sr_neg: float = None
    power_w: float = None

    def get(self, metric):
        """Value by short metric name ('av', 'gbw', ...)."""
        return getattr(self, dict(METRICS)[metric])

    def as_dict(self):
        return dict((short, getattr(self, attr)) for short, attr in METRICS)

    def __json__(self):
        return dict((attr, getattr(self, attr)) for _, attr in METRICS)

    @classmethod
    def from_json(cls, data):
        return cls(**dict(
            (attr, None if data.get(attr) is None
             else loads_float(data[attr]))
            for _, attr in METRICS))


@dataclass
class FrequencyResponse(object):
    """Complex transfer function sampled on an increasing frequency grid."""
    freqs: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.freqs.shape != self.values.shape:
            raise ValueError("Frequency and value grids differ in length")
        if np.any(np.diff(self.freqs) <= 0.0):
            raise ValueError("Frequency grid must be strictly increasing")

    @property
    def grid(self):
        return list(zip(self.freqs.tolist(), self.values.tolist()))

    @property
    def magnitude_db(self):
        return 20.0 * np.log10(np.abs(self.values))

    @property
    def phase_deg(self):
        """Unwrapped phase in degrees, starting from the first sample."""
        return np.degrees(np.unwrap(np.angle(self.values)))

    def __neg__(self):
        return FrequencyResponse(self.freqs, -self.values)

    def __json__(self):
        return {
            'freqs': self.freqs.tolist(),
            'magnitude_db': self.magnitude_db.tolist(),
            'phase_deg': self.phase_deg.tolist(),
        }


def log_grid(f_start, f_stop, points_per_decade):
    """Logarithmic frequency grid including both end points."""
    decades = math.log10(f_stop / f_start)
    count = int(round(decades * points_per_decade)) + 1
    return np.logspace(math.log10(f_start), math.log10(f_stop), count)
