"""Sizing plans: a small DSL for classification-aware sizing equations.

A plan reads calibration parameters and design targets, binds intermediate
values, sizes every MOSFET through one of three directives and predicts the
amplifier's performance::

    plan reference for 2SMC
    classify M6 independent
    classify M7 mirror of M6
    length M6 = 0.5u
    let Iref = 20u
    size independent M6 current=Iref vov=0.2
    size mirror M7 from M6 carrying 2*Iref
    predict sr_neg = 2*Iref/target.cl

The modules of this package:

    ampsizer.plan.nodes       syntax tree
    ampsizer.plan.parser      parse_plan
    ampsizer.plan.validation  structural and netlist checks
    ampsizer.plan.executor    execute_plan, run_plan

"""
from dataclasses import dataclass, fields, replace

from ampsizer.config import get_number
from ampsizer.exceptions import ConfigError
from ampsizer.netlist import DesignVariables
from ampsizer.plan.nodes import (
    Classify,
    Length,
    Predict,
    Set,
    SizeIndependent,
    SizeMatched,
    SizeMirror,
    walk_statements,
)
from ampsizer.simulator import MetricSet
from ampsizer.utils import loads_float

__all__ = [
    'INDEPENDENT',
    'MIRROR',
    'MATCHED',
    'TARGET_METRICS',
    'DesignTargets',
    'DesignVariables',
    'PredictedMetrics',
    'SizingPlan',
]

INDEPENDENT = 'INDEPENDENT'
MIRROR = 'MIRROR'
MATCHED = 'MATCHED'

TARGET_METRICS = ('av', 'gbw', 'pm', 'sr_pos', 'sr_neg', 'power')

# short metric name -> DesignTargets attribute
_TARGET_FIELDS = {
    'av': 'av_db_min',
    'gbw': 'gbw_hz_min',
    'pm': 'pm_deg_min',
    'sr_pos': 'sr_pos_min',
    'sr_neg': 'sr_neg_min',
    'power': 'power_max',
}


@dataclass(frozen=True)
class DesignTargets(object):
    """Performance targets plus the supply and load they apply to.

        av_db_min: gain, dB
        gbw_hz_min: gain-bandwidth product, Hz
        pm_deg_min: phase margin, degrees
        sr_pos_min, sr_neg_min: slew rates, V/s
        power_max: power bound in W, None when unconstrained
        vdd, vss: rails, V
        cl: load capacitance, F
        vcm: input common mode, V (None for mid-rail)

    """
    av_db_min: float
    gbw_hz_min: float
    pm_deg_min: float
    sr_pos_min: float
    sr_neg_min: float
    power_max: float = None
    vdd: float = 0.9
    vss: float = -0.9
    cl: float = 1e-12
    vcm: float = None
    name: str = ''

    def __post_init__(self):
        for metric in TARGET_METRICS:
            value = self.get(metric)
            if value is None and metric == 'power':
                continue
            if value is None or not value > 0.0:
                raise ConfigError(
                    "Target {0} must be positive, got {1!r}".format(
                        metric, value))
        if not self.vdd > self.vss:
            raise ConfigError("vdd must be above vss")
        if not self.cl > 0.0:
            raise ConfigError("Load capacitance must be positive")

    @property
    def common_mode(self):
        if self.vcm is None:
            return 0.5 * (self.vdd + self.vss)
        return self.vcm

    def get(self, metric):
        """Target by short metric name; 'sr' is the larger slew minimum."""
        if metric == 'sr':
            return max(self.sr_pos_min, self.sr_neg_min)
        return getattr(self, _TARGET_FIELDS[metric])

    def metrics(self):
        """Targets that are set, by short metric name."""
        return dict((m, self.get(m)) for m in TARGET_METRICS
                    if self.get(m) is not None)

    def with_metrics(self, values):
        """Copy with some metric targets replaced."""
        return replace(self, **dict(
            (_TARGET_FIELDS[m], v) for m, v in values.items()))

    def __json__(self):
        return dict((f.name, getattr(self, f.name)) for f in fields(self))

    @classmethod
    def from_json(cls, data):
        values = dict(data)
        for key, value in values.items():
            if key != 'name' and value is not None:
                values[key] = loads_float(value)
        return cls(**values)

    @classmethod
    def from_config(cls, data, supplies=None, vcm=None):
        """Build targets from a parsed config.

        Keys: av, gbw, pm, sr (both slews) or sr_pos/sr_neg, power, cl,
        vdd, vss, vcm.  Missing rails are taken from the netlist supplies.

        """
        supplies = supplies or {}
        sr = get_number(data, 'sr')
        values = dict(
            av_db_min=get_number(data, 'av', required=True),
            gbw_hz_min=get_number(data, 'gbw', required=True),
            pm_deg_min=get_number(data, 'pm', required=True),
            sr_pos_min=get_number(data, 'sr_pos', sr, required=sr is None),
            sr_neg_min=get_number(data, 'sr_neg', sr, required=sr is None),
            power_max=get_number(data, 'power'),
            cl=get_number(data, 'cl', required=True),
            name=str(data.get('name', '')),
        )
        rails = [v for k, v in supplies.items() if k.startswith('VDD')]
        vdd = get_number(data, 'vdd', max(rails) if rails else None)
        rails = [v for k, v in supplies.items() if k.startswith('VSS')]
        vss = get_number(data, 'vss', min(rails) if rails else 0.0)
        if vdd is None:
            raise ConfigError("Missing configuration key: vdd")
        values.update(vdd=vdd, vss=vss,
                      vcm=get_number(data, 'vcm', vcm))
        return cls(**values)


@dataclass
class PredictedMetrics(MetricSet):
    """Performance a plan predicts for its own sizing."""

    @classmethod
    def from_predictions(cls, predictions):
        return cls(**dict(
            (attr, predictions.get(short)) for short, attr in (
                ('av', 'av_db'), ('gbw', 'gbw_hz'), ('pm', 'pm_deg'),
                ('sr_pos', 'sr_pos'), ('sr_neg', 'sr_neg'),
                ('power', 'power_w'))))


@dataclass(frozen=True)
class SizingPlan(object):
    """A parsed plan.

        name: plan name from the header
        topology: topology family the plan sizes ('2SMC')
        statements: top-level statements in source order
        text: source text

    """
    name: str
    topology: str
    statements: tuple
    text: str = ''

    @property
    def classifications(self):
        """device -> Classify statement, first one wins."""
        result = {}
        for stmt in self.statements:
            if isinstance(stmt, Classify):
                result.setdefault(stmt.device, stmt)
        return result

    @property
    def lengths(self):
        return dict((s.device, s.expr) for s in self.statements
                    if isinstance(s, Length))

    @property
    def size_directives(self):
        return [s for s in self.statements if isinstance(
            s, (SizeIndependent, SizeMirror, SizeMatched))]

    @property
    def set_directives(self):
        return [s for s in self.statements if isinstance(s, Set)]

    @property
    def passive_directives(self):
        return dict((s.name, s.expr) for s in self.set_directives
                    if s.scope == 'passive')

    @property
    def predictions(self):
        return dict((s.metric, s.expr) for s in self.statements
                    if isinstance(s, Predict))

    def all_statements(self):
        return list(walk_statements(self.statements))
