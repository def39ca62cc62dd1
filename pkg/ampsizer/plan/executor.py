"""Execution of sizing plans.

Size directives apply the classification formulas:

    independent  W = 2 * Id * L / (mu_cox * Vov^2)
    mirror       W = W_ref * (I / I_ref) * (L / L_ref), L = L_ref
    matched      W, L copied from the partner

A sized device also exposes the gm and ro it should reach at its current,
``gm = agm * 2 * Id / Vov`` and ``ro = 1 / (lambda * Id)``, from its
calibration record.

"""
from dataclasses import dataclass, field
import math

from ampsizer.exceptions import PlanExecutionError
from ampsizer.netlist import DesignVariables
from ampsizer.plan import PredictedMetrics
from ampsizer.plan.nodes import (
    Accessor,
    Binary,
    Call,
    Compare,
    Name,
    Number,
    Unary,
)
from ampsizer.utils import parallel

__all__ = [
    'SizedDevice',
    'PlanRun',
    'run_plan',
    'execute_plan',
]

_FUNCTIONS = {
    'sqrt': math.sqrt,
    'abs': abs,
    'atan': math.atan,
    'tan': math.tan,
    'exp': math.exp,
    'log10': math.log10,
    'min': min,
    'max': max,
    'parallel': parallel,
}
_COMPARE = {
    '>=': lambda a, b: a >= b,
    '<=': lambda a, b: a <= b,
    '>': lambda a, b: a > b,
    '<': lambda a, b: a < b,
    '==': lambda a, b: a == b,
    '!=': lambda a, b: a != b,
}
_CALIB_ATTRS = {'lambda': 'lam'}


@dataclass(frozen=True)
class SizedDevice(object):
    w: float
    l: float
    id: float
    vov: float
    gm: float
    ro: float


@dataclass
class PlanRun(object):
    """Everything a plan execution produced.

        bindings: let name -> value, in binding order
        sized: device -> SizedDevice
        design_variables: DesignVariables for the netlist
        predicted: PredictedMetrics

    """
    bindings: dict = field(default_factory=dict)
    sized: dict = field(default_factory=dict)
    design_variables: DesignVariables = None
    predicted: PredictedMetrics = None


class _Executor(object):

    def __init__(self, plan, calib, targets):
        self.plan = plan
        self.calib = calib
        self.targets = targets
        self.run = PlanRun()
        self.lengths = {}
        self.settings = {}
        self.predictions = {}
        self.binding = None

    def fail(self, msg):
        return PlanExecutionError(msg, binding=self.binding)

    # expressions

    def guarded(self, expr):
        try:
            return self.evaluate(expr)
        except ZeroDivisionError:
            raise self.fail("Division by zero")
        except (OverflowError, ValueError) as exc:
            raise self.fail("Arithmetic error: {0}".format(exc))

    def value(self, expr):
        result = self.guarded(expr)
        if isinstance(result, bool) or not math.isfinite(result):
            raise self.fail("Non-finite value {0!r}".format(result))
        return float(result)

    def evaluate(self, expr):
        if isinstance(expr, Number):
            return expr.value
        if isinstance(expr, Name):
            if expr.name == 'pi':
                return math.pi
            try:
                return self.run.bindings[expr.name]
            except KeyError:
                raise self.fail("{0!r} is not bound".format(expr.name))
        if isinstance(expr, Accessor):
            return self.access(expr)
        if isinstance(expr, Unary):
            operand = self.evaluate(expr.operand)
            return -operand if expr.op == '-' else operand
        if isinstance(expr, Binary):
            left, right = self.evaluate(expr.left), self.evaluate(expr.right)
            if expr.op == '+':
                return left + right
            if expr.op == '-':
                return left - right
            if expr.op == '*':
                return left * right
            if expr.op == '/':
                return left / right
            return math.pow(left, right)
        if isinstance(expr, Call):
            args = [self.evaluate(a) for a in expr.args]
            return _FUNCTIONS[expr.func](*args)
        if isinstance(expr, Compare):
            return _COMPARE[expr.op](self.evaluate(expr.left),
                                     self.evaluate(expr.right))
        raise self.fail("Cannot evaluate {0!r}".format(expr))

    def access(self, ref):
        if ref.scope == 'calib':
            record = self.calib.get(ref.item)
            if record is None:
                raise self.fail("No calibration record for {0}".format(
                    ref.item))
            if ref.attr == 'polarity':
                return record.polarity
            value = getattr(record, _CALIB_ATTRS.get(ref.attr, ref.attr))
            if value is None:
                raise self.fail("{0} is unavailable ({1} in {2})".format(
                    ref.dotted, ref.item, record.region))
            return value
        if ref.scope == 'sized':
            try:
                return getattr(self.run.sized[ref.item], ref.attr)
            except KeyError:
                raise self.fail("{0} is not sized yet".format(ref.item))
        if ref.scope == 'target':
            value = self.targets.cl if ref.attr == 'cl' \
                else self.targets.get(ref.attr)
            if value is None:
                raise self.fail("No target set for {0}".format(ref.attr))
            return value
        if ref.scope == 'supply':
            if ref.attr == 'vcm':
                return self.targets.common_mode
            return getattr(self.targets, ref.attr)
        try:
            return self.settings[ref.dotted]
        except KeyError:
            raise self.fail("{0} is not set yet".format(ref.dotted))

    # statements

    def execute(self, statements):
        for stmt in statements:
            getattr(self, 'exec_' + type(stmt).__name__.lower())(stmt)

    def exec_classify(self, stmt):
        pass

    def exec_let(self, stmt):
        self.binding = stmt.name
        self.run.bindings[stmt.name] = self.value(stmt.expr)

    def exec_if(self, stmt):
        self.binding = 'if (line {0})'.format(stmt.line)
        if self.guarded(stmt.condition):
            self.execute(stmt.then)
        else:
            self.execute(stmt.orelse)

    def exec_length(self, stmt):
        self.binding = 'L.' + stmt.device
        length = self.value(stmt.expr)
        if length <= 0.0:
            raise self.fail("Length must be positive, got {0!r}".format(
                length))
        self.lengths[stmt.device] = length

    def record(self, device, attr):
        record = self.calib.get(device)
        value = None if record is None else getattr(record, attr)
        if value is None:
            raise self.fail("{0} has no calibrated {1}".format(
                device, 'lambda' if attr == 'lam' else attr))
        return value

    def length(self, device):
        try:
            return self.lengths[device]
        except KeyError:
            raise self.fail("{0} has no length statement".format(device))

    def sized(self, reference, device):
        try:
            return self.run.sized[reference]
        except KeyError:
            raise self.fail("{0} is sized from {1}, which is not sized "
                            "yet".format(device, reference))

    def sized_device(self, device, w, l, current, vov):
        if not w > 0.0:
            raise self.fail("Width of {0} must be positive, got {1!r}".format(
                device, w))
        gm = self.record(device, 'agm') * 2.0 * current / vov
        lam = self.record(device, 'lam')
        ro = 1.0 / (lam * current) if lam > 0.0 else math.inf
        sized = SizedDevice(w=w, l=l, id=current, vov=vov, gm=gm, ro=ro)
        self.run.sized[device] = sized
        return sized

    def exec_sizeindependent(self, stmt):
        self.binding = 'W.' + stmt.device
        current = self.value(stmt.current)
        vov = self.value(stmt.vov)
        if current <= 0.0 or vov <= 0.0:
            raise self.fail("{0} needs positive current and overdrive, got "
                            "{1!r} and {2!r}".format(stmt.device, current, vov))
        length = self.length(stmt.device)
        mu_cox = self.record(stmt.device, 'mu_cox')
        w = 2.0 * current * length / (mu_cox * vov * vov)
        self.sized_device(stmt.device, w, length, current, vov)

    def exec_sizemirror(self, stmt):
        self.binding = 'W.' + stmt.device
        current = self.value(stmt.current)
        if current <= 0.0:
            raise self.fail("{0} needs a positive current, got {1!r}".format(
                stmt.device, current))
        ref = self.sized(stmt.reference, stmt.device)
        length = ref.l
        w = ref.w * (current / ref.id) * (length / ref.l)
        self.sized_device(stmt.device, w, length, current, ref.vov)

    def exec_sizematched(self, stmt):
        self.binding = 'W.' + stmt.device
        partner = self.sized(stmt.partner, stmt.device)
        self.sized_device(stmt.device, partner.w, partner.l, partner.id,
                          partner.vov)

    def exec_set(self, stmt):
        self.binding = stmt.dotted
        value = self.value(stmt.expr)
        if value <= 0.0:
            raise self.fail("{0} must be positive, got {1!r}".format(
                stmt.dotted, value))
        self.settings[stmt.dotted] = value

    def exec_predict(self, stmt):
        self.binding = 'predict.' + stmt.metric
        self.predictions[stmt.metric] = self.value(stmt.expr)

    def __call__(self):
        self.execute(self.plan.statements)
        run = self.run
        dv = DesignVariables()
        for device, sized in run.sized.items():
            dv.widths[device] = sized.w
            dv.lengths[device] = sized.l
        for dotted, value in self.settings.items():
            scope, name = dotted.split('.', 1)
            if scope == 'passive':
                dv.passives[name] = value
            else:
                dv.bias_currents[name] = value
        run.design_variables = dv
        run.predicted = PredictedMetrics.from_predictions(self.predictions)
        return run


def run_plan(plan, calib, targets):
    """Execute a plan and return the full PlanRun.

        plan: SizingPlan
        calib: device -> CalibrationRecord (extracted or estimated)
        targets: DesignTargets the plan designs for

    """
    return _Executor(plan, calib, targets)()


def execute_plan(plan, calib, targets):
    """Return (DesignVariables, PredictedMetrics) of a plan execution."""
    run = run_plan(plan, calib, targets)
    return run.design_variables, run.predicted
