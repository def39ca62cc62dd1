"""Plan providers: where sizing plans and initial estimates come from.

    ampsizer.provider.static  shipped reference plans, offline
    ampsizer.provider.http    a remote model behind a JSON endpoint

A provider answers one ProviderRequest per round.  Round 0 returns a plan
plus initial parameter estimates; later rounds return a plan only, all
other adaptation comes from recalibration and the design targets.

"""
from dataclasses import dataclass, field
import logging

from ampsizer.exceptions import (
    ConfigError,
    PlanRejectedError,
    PlanSyntaxError,
)
from ampsizer.feedback import MarginConfig
from ampsizer.plan.parser import parse_plan
from ampsizer.plan.validation import validate_plan

__all__ = [
    'PROVIDERS',
    'ProviderRequest',
    'ProviderResponse',
    'Provider',
    'check_plan',
    'accept_plan',
    'get_provider',
]

log = logging.getLogger(__name__)

PROVIDERS = ('static', 'http')


@dataclass
class ProviderRequest(object):
    """Inputs of one provider round.

        round_index: 0 for the initial round
        netlist: Netlist to size
        targets: base DesignTargets
        design_targets: margin-inflated targets of this round
        card: ProcessCard, only the static provider reads it
        previous_plan: plan text of the last round (round >= 1)
        calibration: CalibrationTable of the last round (round >= 1)
        errors: PredictionError list of the last round
        history: RoundHistory so far
        warnings: calibration and campaign warnings to forward
        margins: MarginConfig of the campaign, defaults when None

    """
    round_index: int
    netlist: object
    targets: object
    design_targets: object = None
    card: object = None
    previous_plan: str = None
    calibration: object = None
    errors: list = field(default_factory=list)
    history: object = None
    warnings: list = field(default_factory=list)
    margins: object = None

    def __post_init__(self):
        if self.design_targets is None:
            self.design_targets = self.targets
        if self.margins is None:
            self.margins = MarginConfig()

    @property
    def initial(self):
        return self.round_index == 0


@dataclass
class ProviderResponse(object):
    """An accepted plan.

        plan: SizingPlan, parsed and validated
        estimates: device -> CalibrationRecord, round 0 only
        attempts: requests made until the plan was accepted
        prompt: prompt text that produced the plan, None offline

    """
    plan: object
    estimates: dict = None
    attempts: int = 1
    prompt: str = None

    @property
    def text(self):
        return self.plan.text


class Provider(object):
    name = None
    # keyword arguments the constructor takes from the provider.* config
    settings = ()

    def respond(self, request):
        if request.initial:
            return self.round0(request)
        return self.round_n(request)

    def round0(self, request):
        raise NotImplementedError

    def round_n(self, request):
        raise NotImplementedError


def check_plan(text, net, targets=None):
    """Return (SizingPlan or None, diagnostics) for plan text."""
    try:
        plan = parse_plan(text, check=False)
    except PlanSyntaxError as exc:
        return None, [str(exc)]
    return plan, validate_plan(plan, net, targets)


def accept_plan(text, net, targets=None, attempts=1):
    """Parse and validate plan text, raising PlanRejectedError on failure."""
    plan, diagnostics = check_plan(text, net, targets)
    if diagnostics:
        raise PlanRejectedError(diagnostics=diagnostics, attempts=attempts)
    return plan


def get_provider(name, settings=None):
    """Provider instance by name.

        name: 'static' or 'http'
        settings: provider keyword arguments (the ``provider.*`` config)

    """
    if name == 'static':
        from ampsizer.provider.static import StaticProvider
        cls = StaticProvider
    elif name == 'http':
        from ampsizer.provider.http import HttpProvider
        cls = HttpProvider
    else:
        raise ConfigError("Unknown provider {0!r}; expected one of {1}".format(
            name, ', '.join(PROVIDERS)))
    kwargs = {}
    for key, value in (settings or {}).items():
        if key in cls.settings:
            kwargs[key] = value
        elif key != 'name':
            log.debug("Ignoring provider.%s for the %s provider", key, name)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError("Invalid {0} provider settings: {1}".format(
            name, exc))
