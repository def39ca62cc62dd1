"""Prediction errors, margin-inflated design targets and the round history.

Each metric has an error kind that fixes how its discrepancy is measured
and how the next round's design target is inflated:

    LINEAR   gbw, sr_pos, sr_neg, power   X = (pred - meas) / meas * 100 %
    LOG_DB   av                           Y = pred - meas, dB
    DEGREES  pm                           Z = pred - meas, degrees

A positive error is an over-prediction.  Margins are recomputed from the
latest round only; they never compound.

"""
from dataclasses import dataclass, field, fields
import logging

from ampsizer.config import get_number
from ampsizer.exceptions import FeedbackError
from ampsizer.netlist import DesignVariables
from ampsizer.plan import TARGET_METRICS, DesignTargets, PredictedMetrics
from ampsizer.simulator import MetricSet
from ampsizer.utils import loads_float

__all__ = [
    'LINEAR',
    'LOG_DB',
    'DEGREES',
    'METRIC_KINDS',
    'METRIC_LABELS',
    'PredictionError',
    'MarginConfig',
    'Verdict',
    'RoundRecord',
    'RoundHistory',
    'compute_errors',
    'derive_design_targets',
    'trusts_measured_pm',
    'check_convergence',
    'format_errors',
    'format_metric',
]

log = logging.getLogger(__name__)

LINEAR = 'LINEAR'
LOG_DB = 'LOG_DB'
DEGREES = 'DEGREES'

METRIC_KINDS = {
    'av': LOG_DB,
    'gbw': LINEAR,
    'pm': DEGREES,
    'sr_pos': LINEAR,
    'sr_neg': LINEAR,
    'power': LINEAR,
}

# metrics bounded from above; every other target is a minimum
UPPER_BOUNDS = ('power',)

_UNITS = {LINEAR: '%', LOG_DB: 'dB', DEGREES: 'deg'}

METRIC_LABELS = {
    'av': 'Gain',
    'gbw': 'GBW',
    'pm': 'Phase margin',
    'sr_pos': 'SR+',
    'sr_neg': 'SR-',
    'power': 'Power',
}

# metric -> (display scale, unit)
_DISPLAY = {
    'av': (1.0, 'dB'),
    'gbw': (1e-6, 'MHz'),
    'pm': (1.0, '°'),
    'sr_pos': (1e-6, 'V/µs'),
    'sr_neg': (1e-6, 'V/µs'),
    'power': (1e3, 'mW'),
}


def format_metric(metric, value):
    """'100 MHz', '60.5 dB', '74.8°' for display."""
    if value is None:
        return '-'
    scale, unit = _DISPLAY[metric]
    text = '{0:.4g}'.format(value * scale)
    return text + unit if unit == '°' else text + ' ' + unit


@dataclass(frozen=True)
class PredictionError(object):
    """Predicted against measured value of one metric.

    ``error`` is None when it is undefined, a LINEAR metric measured at
    exactly zero.

    """
    metric: str
    kind: str
    predicted: float
    measured: float
    error: float = None

    @property
    def defined(self):
        return self.error is not None

    @property
    def over_predicted(self):
        if self.error is None:
            return self.predicted > 0.0
        return self.error > 0.0

    @property
    def unit(self):
        return _UNITS[self.kind]

    def __json__(self):
        return dict((f.name, getattr(self, f.name)) for f in fields(self))

    @classmethod
    def from_json(cls, data):
        values = dict(data)
        for key in ('predicted', 'measured', 'error'):
            if values.get(key) is not None:
                values[key] = loads_float(values[key])
        return cls(**values)


@dataclass(frozen=True)
class MarginConfig(object):
    """Caps on the margin added per round.

        linear_cap: percent
        db_cap: dB
        deg_cap: degrees
        pm_catastrophe_threshold: predicted PM below which a passing
            measured PM is trusted and no PM margin is added

    """
    linear_cap: float = 200.0
    db_cap: float = 12.0
    deg_cap: float = 20.0
    pm_catastrophe_threshold: float = 20.0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0.0:
                raise FeedbackError("margin.{0} must not be negative".format(
                    f.name))

    @classmethod
    def from_config(cls, data):
        values = {}
        for f in fields(cls):
            value = get_number(data, 'margin.' + f.name)
            if value is not None:
                values[f.name] = value
        return cls(**values)

    def __json__(self):
        return dict((f.name, getattr(self, f.name)) for f in fields(self))


def _clamp(value, cap):
    return min(max(value, 0.0), cap)


def compute_errors(predicted, measured, metrics=None):
    """Per-metric PredictionError list.

        predicted: PredictedMetrics of the plan
        measured: MetricSet from simulation
        metrics: short metric names to compare; every metric present in
            both sets when None

    """
    if metrics is None:
        metrics = [m for m in TARGET_METRICS if predicted.get(m) is not None
                   and measured.get(m) is not None]
    errors = []
    for metric in metrics:
        pred, meas = predicted.get(metric), measured.get(metric)
        if pred is None or meas is None:
            raise FeedbackError(
                "Metric {0} is missing from the {1} values".format(
                    metric, 'predicted' if pred is None else 'measured'))
        kind = METRIC_KINDS[metric]
        if kind == LINEAR:
            error = None if meas == 0.0 else (pred - meas) / meas * 100.0
        else:
            error = pred - meas
        errors.append(PredictionError(metric, kind, pred, meas, error))
    return errors


def trusts_measured_pm(err, targets, cfg=None):
    """True when a catastrophically low PM prediction measured as passing.

    Such a round keeps the base PM target: the measured value is trusted.
    """
    cfg = cfg or MarginConfig()
    target = targets.get(err.metric)
    return err.kind == DEGREES and target is not None and \
        err.predicted < cfg.pm_catastrophe_threshold and \
        err.measured >= target


def _design_value(err, base, cfg, targets):
    if err.kind == DEGREES:
        if trusts_measured_pm(err, targets, cfg):
            log.info("PM predicted at %.1f deg but measured %.1f deg passes; "
                     "no PM margin", err.predicted, err.measured)
            return base
        return base + _clamp(err.error, cfg.deg_cap)
    if err.kind == LOG_DB:
        return base + _clamp(err.error, cfg.db_cap)
    if err.error is None:
        # measured zero: the over-prediction is unbounded
        return base * (1.0 + cfg.linear_cap / 100.0)
    return base * (1.0 + _clamp(err.error, cfg.linear_cap) / 100.0)


def derive_design_targets(base, errors, cfg=None):
    """Design targets for the next plan execution.

    Every over-predicted metric, the power bound included, is raised by
    its (capped) error.  Everything else keeps its base value exactly.

        base: DesignTargets of the campaign
        errors: PredictionError list of the latest round
        cfg: MarginConfig, defaults when None

    """
    cfg = cfg or MarginConfig()
    values = {}
    for err in errors:
        target = base.get(err.metric)
        if target is None:
            continue
        design = _design_value(err, target, cfg, base)
        if design != target:
            values[err.metric] = design
    return base.with_metrics(values) if values else base


@dataclass(frozen=True)
class Verdict(object):
    """Per-metric pass/fail against the base targets."""
    checks: dict

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def failures(self):
        return sorted(m for m, ok in self.checks.items() if not ok)

    def __bool__(self):
        return self.passed

    def __json__(self):
        return {'passed': self.passed, 'checks': dict(self.checks)}

    @classmethod
    def from_json(cls, data):
        return cls(dict(data['checks']))


def check_convergence(measured, base):
    """Verdict of measured metrics against base targets, inclusive."""
    checks = {}
    for metric, target in base.metrics().items():
        value = measured.get(metric)
        if value is None:
            checks[metric] = False
        elif metric in UPPER_BOUNDS:
            checks[metric] = value <= target
        else:
            checks[metric] = value >= target
    return Verdict(checks)


def format_errors(errors):
    """Side-by-side predicted/measured/error table."""
    lines = ['{0:<8} {1:>14} {2:>14} {3:>10}'.format(
        'Metric', 'Predicted', 'Measured', 'Error')]
    for err in errors:
        error = 'undefined' if err.error is None else '{0:+.2f} {1}'.format(
            err.error, err.unit)
        lines.append('{0:<8} {1:>14.6g} {2:>14.6g} {3:>10}'.format(
            err.metric, err.predicted, err.measured, error))
    return '\n'.join(lines) + '\n'


@dataclass(frozen=True)
class RoundRecord(object):
    """Everything one round produced.

        index: round number, 0 first
        design_targets: targets the plan was executed against
        design_variables: sizing applied to the netlist
        predicted: PredictedMetrics of the plan
        measured: MetricSet from simulation
        errors: PredictionError list
        verdict: Verdict against the base targets
        warnings: calibration and campaign warnings of the round

    """
    index: int
    design_targets: DesignTargets
    design_variables: DesignVariables
    predicted: PredictedMetrics
    measured: MetricSet
    errors: tuple
    verdict: Verdict
    warnings: tuple = ()

    def __json__(self):
        return {
            'index': self.index,
            'design_targets': self.design_targets.__json__(),
            'design_variables': self.design_variables.__json__(),
            'predicted': self.predicted.__json__(),
            'measured': self.measured.__json__(),
            'errors': [e.__json__() for e in self.errors],
            'verdict': self.verdict.__json__(),
            'warnings': list(self.warnings),
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            index=int(data['index']),
            design_targets=DesignTargets.from_json(data['design_targets']),
            design_variables=DesignVariables.from_json(
                data['design_variables']),
            predicted=PredictedMetrics.from_json(data['predicted']),
            measured=MetricSet.from_json(data['measured']),
            errors=tuple(PredictionError.from_json(e)
                         for e in data['errors']),
            verdict=Verdict.from_json(data['verdict']),
            warnings=tuple(data.get('warnings', ())),
        )


@dataclass
class RoundHistory(object):
    """Append-only log of every round of a campaign."""
    _rounds: list = field(default_factory=list)

    def append(self, record):
        if record.index != len(self._rounds):
            raise FeedbackError(
                "Round {0} appended after {1} round(s)".format(
                    record.index, len(self._rounds)))
        self._rounds.append(record)

    @property
    def rounds(self):
        return tuple(self._rounds)

    @property
    def latest(self):
        return self._rounds[-1] if self._rounds else None

    def __iter__(self):
        return iter(tuple(self._rounds))

    def __len__(self):
        return len(self._rounds)

    def __getitem__(self, index):
        return self._rounds[index]

    def recurrence(self):
        """(earlier, later) indices of the first sizing seen twice in
        non-adjacent rounds, or None."""
        for later, record in enumerate(self._rounds):
            for earlier in range(later - 1):
                if self._rounds[earlier].design_variables == \
                        record.design_variables:
                    return earlier, later
        return None

    def __json__(self):
        return [r.__json__() for r in self._rounds]

    @classmethod
    def from_json(cls, data):
        history = cls()
        for item in data:
            history.append(RoundRecord.from_json(item))
        return history
