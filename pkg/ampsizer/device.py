"""Built-in MOSFET model.

Square-law current with mobility degradation, channel-length modulation and
body effect, evaluated analytically together with its partial derivatives
and a simple charge model for AC and transient analysis.

"""
from dataclasses import dataclass, fields
import math

from ampsizer.config import get_number, load_config
from ampsizer.exceptions import ConfigError

__all__ = [
    'CUTOFF',
    'TRIODE',
    'SAT',
    'NMOS',
    'PMOS',
    'DeviceParams',
    'ProcessCard',
    'DeviceEval',
    'eval_mosfet',
]

CUTOFF = 'CUTOFF'
TRIODE = 'TRIODE'
SAT = 'SAT'

NMOS = 'NMOS'
PMOS = 'PMOS'

# Lower bound of phiF2 + Vsb under forward source-bulk bias.
_BODY_CLAMP = 1e-2


@dataclass(frozen=True)
class DeviceParams(object):
    """Model parameters of one device type.

        mu0cox: low-field transconductance factor, A/V^2
        vth0: zero-bias threshold, V
        gamma: body-effect coefficient, V^0.5
        phif2: twice the Fermi potential, V
        theta: mobility degradation, 1/V
        lambdal: channel-length modulation times length, m/V
        coxarea: gate capacitance per area, F/m^2
        covl: overlap capacitance per width, F/m
        cj: junction capacitance per area, F/m^2
        ldrain: drain/source diffusion extent, m

    """
    mu0cox: float
    vth0: float
    gamma: float = 0.0
    phif2: float = 0.8
    theta: float = 0.0
    lambdal: float = 0.0
    coxarea: float = 0.0
    covl: float = 0.0
    cj: float = 0.0
    ldrain: float = 0.0

    def __post_init__(self):
        if not self.mu0cox > 0.0:
            raise ConfigError("mu0cox must be positive")
        if self.phif2 <= 0.0:
            raise ConfigError("phif2 must be positive")
        for name in ('gamma', 'theta', 'lambdal', 'coxarea', 'covl', 'cj',
                     'ldrain'):
            if getattr(self, name) < 0.0:
                raise ConfigError("{0} must not be negative".format(name))

    def __json__(self):
        return dict((f.name, getattr(self, f.name)) for f in fields(self))


@dataclass(frozen=True)
class ProcessCard(object):
    name: str
    nmos: DeviceParams
    pmos: DeviceParams

    def params(self, model):
        if model == NMOS:
            return self.nmos
        if model == PMOS:
            return self.pmos
        raise ConfigError("Unknown device type {0!r}".format(model))

    def __json__(self):
        return {'name': self.name, 'nmos': self.nmos.__json__(),
                'pmos': self.pmos.__json__()}

    @classmethod
    def from_json(cls, data):
        return cls(data['name'], DeviceParams(**data['nmos']),
                   DeviceParams(**data['pmos']))

    @classmethod
    def from_config(cls, data, name=None):
        """Build a card from a parsed config (``nmos.mu0cox = 300u`` ...)."""
        types = {}
        for kind in ('nmos', 'pmos'):
            values = {}
            for f in fields(DeviceParams):
                value = get_number(data, kind + '.' + f.name,
                                   required=f.name in ('mu0cox', 'vth0'))
                if value is not None:
                    values[f.name] = value
            types[kind] = DeviceParams(**values)
        return cls(str(data.get('name', name or 'custom')),
                   types['nmos'], types['pmos'])

    @classmethod
    def load(cls, path):
        return cls.from_config(load_config(path))


@dataclass(frozen=True)
class DeviceEval(object):
    """Device state at one bias point.

    Voltages and conductances are in the device's own frame: for PMOS the
    terminal voltages are negated, so vth, vov, gm, gds and gmb come out
    positive for a conducting device.  id is the current into the drain
    terminal and carries the sign of the device type.  When the drain sits
    below the source (reverse operation) the roles of the two terminals
    are exchanged and ``reverse`` is set.

    """
    id: float
    gm: float
    gds: float
    gmb: float
    vth: float
    vov: float
    region: str
    cgs: float
    cgd: float
    cdb: float
    csb: float
    reverse: bool = False

    def partials(self):
        """d(id)/d(Vgs, Vds, Vsb) in the external terminal frame."""
        if self.reverse:
            return -self.gm, self.gm + self.gds + self.gmb, self.gmb
        return self.gm, self.gds, -self.gmb


def _forward(p, w, l, vgs, vds, vsb):
    """NMOS-frame evaluation for vds >= 0.

    Returns (id, gm, gds, gmb, vth, vov, region).
    """
    arg = p.phif2 + vsb
    if arg > _BODY_CLAMP:
        sq = math.sqrt(arg)
        dvth = p.gamma / (2.0 * sq)
    else:
        sq = math.sqrt(_BODY_CLAMP)
        dvth = 0.0
    vth = p.vth0 + p.gamma * (sq - math.sqrt(p.phif2))
    vov = vgs - vth
    if vov <= 0.0:
        return 0.0, 0.0, 0.0, 0.0, vth, vov, CUTOFF

    lam = p.lambdal / l
    denom = 1.0 + p.theta * vov
    k = p.mu0cox * (w / l) / denom
    dk = -k * p.theta / denom
    clm = 1.0 + lam * vds
    if vds >= vov:
        g, dg_dvov, dg_dvds, region = 0.5 * vov * vov, vov, 0.0, SAT
    else:
        g = vov * vds - 0.5 * vds * vds
        dg_dvov, dg_dvds, region = vds, vov - vds, TRIODE

    ids = k * g * clm
    gm = (dk * g + k * dg_dvov) * clm
    gds = k * (dg_dvds * clm + g * lam)
    return ids, gm, gds, gm * dvth, vth, vov, region


def _capacitances(p, w, l, region):
    overlap = p.covl * w
    gate = w * l * p.coxarea
    if region == SAT:
        cgs, cgd = 2.0 / 3.0 * gate + overlap, overlap
    elif region == TRIODE:
        cgs = cgd = 0.5 * gate + overlap
    else:
        cgs = cgd = overlap
    junction = p.cj * w * p.ldrain
    return cgs, cgd, junction, junction


def eval_mosfet(card, model, w, l, vgs, vds, vsb):
    """Evaluate a MOSFET at the given terminal voltages.

        card: ProcessCard
        model: NMOS or PMOS
        w, l: geometry in meters
        vgs, vds, vsb: terminal voltages in volts (external frame)

    """
    p = card.params(model)
    sign = 1.0 if model == NMOS else -1.0
    vgs, vds, vsb = sign * vgs, sign * vds, sign * vsb
    reverse = bool(vds < 0.0)
    if reverse:
        vgs, vds, vsb = vgs - vds, -vds, vsb + vds
    ids, gm, gds, gmb, vth, vov, region = _forward(p, w, l, vgs, vds, vsb)
    cgs, cgd, cdb, csb = _capacitances(p, w, l, region)
    if reverse:
        ids, cgs, cgd, cdb, csb = -ids, cgd, cgs, csb, cdb
    return DeviceEval(id=sign * ids, gm=gm, gds=gds, gmb=gmb, vth=vth,
                      vov=vov, region=region, cgs=cgs, cgd=cgd, cdb=cdb,
                      csb=csb, reverse=reverse)
