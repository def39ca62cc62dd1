"""One-shot calibration of device parameters from a DC operating point.

For every MOSFET four parameters are extracted from a single solve:

    mu_cox  2 * Id * L / (W * Vov^2)     square-law transconductance factor
    agm     gm * Vov / (2 * Id)          gm relative to the ideal 2 Id / Vov
    lambda  gds / Id                     channel-length modulation
    vth     threshold including body effect

All quantities are magnitudes, so PMOS rows read like NMOS rows.

"""
from dataclasses import dataclass, field, fields
import math

from ampsizer.device import CUTOFF, SAT, TRIODE
from ampsizer.exceptions import AmpsizerError
from ampsizer.utils import loads_float

__all__ = [
    'ESTIMATE',
    'CalibrationRecord',
    'CalibrationTable',
    'extract_device',
    'extract_table',
    'flag_regions',
    'format_table',
    'estimate_record',
]


@dataclass(frozen=True)
class CalibrationRecord(object):
    """Calibration row of one device, SI units.

    The extracted parameters are None for a device in cutoff.
    """
    device: str
    type: str
    w: float
    l: float
    id: float
    vov: float
    vds: float
    gm: float
    gds: float
    region: str
    mu_cox: float = None
    agm: float = None
    lam: float = None
    ro: float = None
    vth: float = None

    @property
    def conducting(self):
        return self.region != CUTOFF

    @property
    def polarity(self):
        return 1.0 if self.type == 'NMOS' else -1.0

    def __json__(self):
        data = dict((f.name, getattr(self, f.name)) for f in fields(self))
        data['lambda'] = data.pop('lam')
        return data

    @classmethod
    def from_json(cls, data):
        data = dict(data)
        if 'lambda' in data:
            data['lam'] = data.pop('lambda')
        values = {}
        for f in fields(cls):
            value = data.get(f.name)
            if f.type is float and value is not None:
                value = loads_float(value)
            values[f.name] = value
        return cls(**values)


@dataclass
class CalibrationTable(object):
    rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def get(self, device):
        for row in self.rows:
            if row.device == device:
                return row
        raise KeyError(device)

    def as_map(self):
        return dict((row.device, row) for row in self.rows)

    def __json__(self):
        return {'rows': [r.__json__() for r in self.rows],
                'warnings': list(self.warnings)}

    @classmethod
    def from_json(cls, data):
        return cls([CalibrationRecord.from_json(r) for r in data['rows']],
                   list(data.get('warnings', [])))


def extract_device(op, w, l, name=''):
    """Extract a CalibrationRecord from a DeviceOP.

        op: DeviceOP of the device
        w, l: geometry in meters
        name: device name for the record

    """
    ids = abs(op.id)
    vov = op.vov
    vds = abs(op.vds)
    base = dict(device=name, type=op.model, w=w, l=l, id=ids, vov=vov,
                vds=vds, gm=op.gm, gds=op.gds)
    if ids <= 0.0 or vov <= 0.0:
        return CalibrationRecord(region=CUTOFF, **base)
    region = TRIODE if vds < vov else SAT
    ro = 1.0 / op.gds if op.gds > 0.0 else math.inf
    return CalibrationRecord(
        region=region,
        mu_cox=2.0 * ids * l / (w * vov * vov),
        agm=op.gm * vov / (2.0 * ids),
        lam=op.gds / ids,
        ro=ro,
        vth=op.vth,
        **base)


def flag_regions(table):
    """One warning per device outside saturation."""
    warnings = []
    for row in table.rows:
        if row.region == TRIODE:
            warnings.append(
                "{0} in TRIODE (|Vds|={1:.0f}mV < Vov={2:.0f}mV)".format(
                    row.device, row.vds * 1e3, row.vov * 1e3))
        elif row.region == CUTOFF:
            warnings.append(
                "{0} in CUTOFF (Ids={1:.2f}uA, Vov={2:.0f}mV)".format(
                    row.device, row.id * 1e6, row.vov * 1e3))
    return warnings


def extract_table(op, net):
    """CalibrationTable of every MOSFET in net, in netlist order."""
    rows = []
    for inst in net.mosfets:
        try:
            dop = op.device_ops[inst.name]
        except KeyError:
            raise AmpsizerError(
                "Operating point has no entry for {0}".format(inst.name))
        rows.append(extract_device(dop, inst.w, inst.l, inst.name))
    table = CalibrationTable(rows)
    table.warnings = flag_regions(table)
    return table


HEADER = ('Dev', 'Type', 'W/L(μm/μm)', 'Ids(μA)', 'Vov(mV)',
          'Vds(mV)', 'gm(μS)', 'Region', 'μCox(μA/V2)',
          'a_gm', 'lam(1/V)', 'ro(kOhm)', 'Vth(mV)')


def _optional(fmt, value, scale=1.0):
    if value is None:
        return '-'
    if math.isinf(value):
        return 'inf'
    return fmt % (value * scale)


def _row(r):
    return (
        r.device,
        r.type,
        '%.1f/%.2f' % (r.w * 1e6, r.l * 1e6),
        '%.2f' % (r.id * 1e6),
        '%.1f' % (r.vov * 1e3),
        '%.1f' % (r.vds * 1e3),
        '%.2f' % (r.gm * 1e6),
        r.region,
        _optional('%.1f', r.mu_cox, 1e6),
        _optional('%.3f', r.agm),
        _optional('%.4f', r.lam),
        _optional('%.1f', r.ro, 1e-3),
        _optional('%.1f', r.vth, 1e3),
    )


def format_table(table):
    """Render the table as aligned text with warnings below it."""
    lines = [HEADER] + [_row(r) for r in table.rows]
    widths = [max(len(line[i]) for line in lines)
              for i in range(len(HEADER))]
    text = [' '.join(cell.ljust(width) for cell, width in zip(line, widths))
            .rstrip() for line in lines]
    if table.warnings:
        text.append('')
        text.extend('WARNING: ' + warning for warning in table.warnings)
    return '\n'.join(text) + '\n'


ESTIMATE = 'ESTIMATE'


def estimate_record(inst, mu_cox, agm, lam, vth):
    """Calibration record holding initial estimates for a netlist MOSFET.

    The bias fields are zero and the region is ESTIMATE; plans only read
    the four parameters.

    """
    return CalibrationRecord(
        device=inst.name, type=inst.model, w=inst.w, l=inst.l, id=0.0,
        vov=0.0, vds=0.0, gm=0.0, gds=0.0, region=ESTIMATE, mu_cox=mu_cox,
        agm=agm, lam=lam, ro=None, vth=vth)
