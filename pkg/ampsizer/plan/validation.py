"""Structural checks of sizing plans.

``structural_problems`` inspects a plan on its own: classification
references, single assignment, use-before-bind of every name and accessor,
channel lengths of mirrors, and that every classified device is sized.
``validate_plan`` adds the checks that need the netlist and targets.

"""
from ampsizer.exceptions import (
    CircularReferenceError,
    MirrorLengthError,
    PlanSyntaxError,
    UnclassifiedDeviceError,
)
from ampsizer.netlist import (
    CAPACITOR,
    CURRENT_SOURCE,
    RESISTOR,
    VOLTAGE_SOURCE,
)
from ampsizer.plan import INDEPENDENT, MATCHED, MIRROR
from ampsizer.plan.nodes import Accessor, Classify, Name, references

__all__ = [
    'structural_problems',
    'validate_plan',
]

_CONSTANTS = ('pi',)


class _Scope(object):
    """What is bound at a point of the plan."""

    def __init__(self):
        self.names = set()
        self.sized = set()
        self.lengths = {}
        self.settings = set()
        self.predictions = set()

    def copy(self):
        other = _Scope()
        other.names = set(self.names)
        other.sized = set(self.sized)
        other.lengths = dict(self.lengths)
        other.settings = set(self.settings)
        other.predictions = set(self.predictions)
        return other


class _Checker(object):

    def __init__(self, plan):
        self.plan = plan
        self.problems = []
        self.classes = {}

    def report(self, problem):
        self.problems.append(problem)

    def check(self):
        self.check_classifications()
        scope = _Scope()
        self.check_block(self.plan.statements, scope)
        for device, stmt in sorted(self.classes.items()):
            if device not in scope.sized:
                self.report(PlanSyntaxError(
                    "{0} is classified but never sized".format(device),
                    stmt.line, stmt.column))
        return self.problems

    def check_classifications(self):
        for stmt in self.plan.statements:
            if not isinstance(stmt, Classify):
                continue
            if stmt.device in self.classes:
                self.report(PlanSyntaxError(
                    "{0} is classified twice".format(stmt.device),
                    stmt.line, stmt.column))
                continue
            self.classes[stmt.device] = stmt
        for device, stmt in self.classes.items():
            if stmt.reference is None:
                continue
            if stmt.reference == device:
                self.report(CircularReferenceError(
                    "{0} cannot reference itself".format(device),
                    stmt.line, stmt.column))
            elif stmt.reference not in self.classes:
                self.report(UnclassifiedDeviceError(
                    "{0} references {1}, which has no classification"
                    .format(device, stmt.reference), stmt.reference))
        # reference chains
        for device in sorted(self.classes):
            seen = [device]
            reference = self.classes[device].reference
            while reference in self.classes and reference not in seen:
                seen.append(reference)
                reference = self.classes[reference].reference
            if reference == device and len(seen) > 1 and \
                    device == min(seen):
                stmt = self.classes[device]
                self.report(CircularReferenceError(
                    "Reference chain of {0} is circular: {1}".format(
                        device, ' -> '.join(seen + [device])),
                    stmt.line, stmt.column))

    def classification(self, device):
        try:
            return self.classes[device]
        except KeyError:
            self.report(UnclassifiedDeviceError(device=device))
            return None

    def check_expr(self, expr, scope):
        for ref in references(expr):
            if isinstance(ref, Name):
                if ref.name not in scope.names and ref.name not in _CONSTANTS:
                    self.report(CircularReferenceError(
                        "{0!r} is used before it is bound".format(ref.name),
                        ref.line, ref.column))
            elif isinstance(ref, Accessor):
                self.check_accessor(ref, scope)

    def check_accessor(self, ref, scope):
        if ref.scope == 'calib':
            if ref.item not in self.classes:
                self.report(UnclassifiedDeviceError(device=ref.item))
        elif ref.scope == 'sized':
            if ref.item not in scope.sized:
                self.report(CircularReferenceError(
                    "sized.{0} is read before {0} is sized".format(ref.item),
                    ref.line, ref.column))
        elif ref.scope in ('passive', 'source', 'bias'):
            if ref.dotted not in scope.settings:
                self.report(CircularReferenceError(
                    "{0} is read before it is set".format(ref.dotted),
                    ref.line, ref.column))

    def bind(self, name, stmt, scope):
        if name in scope.names:
            self.report(PlanSyntaxError(
                "{0!r} is already bound".format(name),
                stmt.line, stmt.column))
        scope.names.add(name)

    def check_block(self, statements, scope):
        for stmt in statements:
            handler = getattr(self, 'check_' + type(stmt).__name__.lower())
            handler(stmt, scope)

    def check_classify(self, stmt, scope):
        pass

    def check_let(self, stmt, scope):
        self.check_expr(stmt.expr, scope)
        self.bind(stmt.name, stmt, scope)

    def check_if(self, stmt, scope):
        self.check_expr(stmt.condition, scope)
        then_scope, else_scope = scope.copy(), scope.copy()
        self.check_block(stmt.then, then_scope)
        self.check_block(stmt.orelse, else_scope)
        scope.names |= then_scope.names & else_scope.names

    def check_length(self, stmt, scope):
        self.check_expr(stmt.expr, scope)
        cls = self.classification(stmt.device)
        if stmt.device in scope.lengths:
            self.report(PlanSyntaxError(
                "Length of {0} is set twice".format(stmt.device),
                stmt.line, stmt.column))
        if stmt.device in scope.sized:
            self.report(PlanSyntaxError(
                "Length of {0} is set after it is sized".format(stmt.device),
                stmt.line, stmt.column))
        if cls is not None and cls.kind in (MIRROR, MATCHED):
            reference = self.plan.lengths.get(cls.reference)
            if reference != stmt.expr:
                self.report(MirrorLengthError(stmt.device, cls.reference))
        scope.lengths[stmt.device] = stmt.expr

    def check_sized(self, stmt, scope, kind, reference=None):
        cls = self.classification(stmt.device)
        if stmt.device in scope.sized:
            self.report(PlanSyntaxError(
                "{0} is sized twice".format(stmt.device),
                stmt.line, stmt.column))
        if cls is not None:
            if cls.kind != kind:
                self.report(PlanSyntaxError(
                    "{0} is classified {1} and cannot be sized as {2}".format(
                        stmt.device, cls.kind.lower(), kind.lower()),
                    stmt.line, stmt.column))
            elif reference is not None and cls.reference != reference:
                self.report(PlanSyntaxError(
                    "{0} is classified against {1}, not {2}".format(
                        stmt.device, cls.reference, reference),
                    stmt.line, stmt.column))
        if reference is not None and reference not in scope.sized:
            self.report(CircularReferenceError(
                "{0} is sized from {1} before {1} is sized".format(
                    stmt.device, reference), stmt.line, stmt.column))
        scope.sized.add(stmt.device)

    def check_sizeindependent(self, stmt, scope):
        self.check_expr(stmt.current, scope)
        self.check_expr(stmt.vov, scope)
        if stmt.device not in scope.lengths:
            self.report(PlanSyntaxError(
                "Length of {0} must be set before it is sized".format(
                    stmt.device), stmt.line, stmt.column))
        self.check_sized(stmt, scope, INDEPENDENT)

    def check_sizemirror(self, stmt, scope):
        self.check_expr(stmt.current, scope)
        self.check_sized(stmt, scope, MIRROR, stmt.reference)

    def check_sizematched(self, stmt, scope):
        self.check_sized(stmt, scope, MATCHED, stmt.partner)

    def check_set(self, stmt, scope):
        self.check_expr(stmt.expr, scope)
        if stmt.dotted in scope.settings:
            self.report(PlanSyntaxError(
                "{0} is set twice".format(stmt.dotted),
                stmt.line, stmt.column))
        scope.settings.add(stmt.dotted)

    def check_predict(self, stmt, scope):
        self.check_expr(stmt.expr, scope)
        if stmt.metric in scope.predictions:
            self.report(PlanSyntaxError(
                "{0} is predicted twice".format(stmt.metric),
                stmt.line, stmt.column))
        scope.predictions.add(stmt.metric)


def structural_problems(plan):
    """PlanError instances describing every structural problem, in order."""
    return _Checker(plan).check()


def validate_plan(plan, net, targets=None):
    """Diagnostics of a plan against a netlist, empty when it is usable.

        plan: SizingPlan, parsed with or without checks
        net: Netlist the plan should size
        targets: DesignTargets whose metrics need predictions; all metrics
            but power when None

    """
    diagnostics = [str(p) for p in structural_problems(plan)]
    if plan.topology != net.topology:
        diagnostics.append("Plan is for topology {0}, netlist is {1}".format(
            plan.topology, net.topology))
    classes = plan.classifications
    mosfets = dict((m.name, m) for m in net.mosfets)
    for name in mosfets:
        if name not in classes:
            diagnostics.append("{0} is not classified".format(name))
    for name, stmt in sorted(classes.items()):
        if name not in mosfets:
            diagnostics.append(
                "{0} is classified but not in the netlist".format(name))
            continue
        if stmt.reference in mosfets and \
                mosfets[stmt.reference].model != mosfets[name].model:
            diagnostics.append(
                "{0} {1} ({2}) and its reference {3} ({4}) differ in type"
                .format(stmt.kind.capitalize(), name, mosfets[name].model,
                        stmt.reference, mosfets[stmt.reference].model))
    allowed = {
        'passive': (RESISTOR, CAPACITOR),
        'source': (CURRENT_SOURCE, VOLTAGE_SOURCE),
    }
    for stmt in plan.set_directives:
        kinds = allowed.get(stmt.scope)
        if kinds is None:
            continue
        if stmt.name not in net or net.get(stmt.name).kind not in kinds:
            diagnostics.append("{0} names no {1} in the netlist".format(
                stmt.dotted, stmt.scope))
    if targets is None:
        required = ('av', 'gbw', 'pm', 'sr_pos', 'sr_neg')
    else:
        required = sorted(targets.metrics())
    predictions = plan.predictions
    for metric in required:
        if metric not in predictions:
            diagnostics.append(
                "No prediction for targeted metric {0}".format(metric))
    return diagnostics
