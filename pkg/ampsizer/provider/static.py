"""Deterministic provider backed by the shipped reference plans."""
import io
import logging

from ampsizer.calibration import estimate_record
from ampsizer.exceptions import ConfigError, ProviderError
from ampsizer.library import reference_plan_path
from ampsizer.provider import Provider, ProviderResponse, accept_plan

__all__ = ['INITIAL_AGM', 'StaticProvider']

log = logging.getLogger(__name__)

# mid-range of the gm non-ideality observed across devices and processes
INITIAL_AGM = 0.7


class StaticProvider(Provider):
    """Reference plan plus card-derived estimates in round 0, the same plan
    in every later round.

        mu_cox_scale: factor applied to the round-0 mu_cox estimates, for
            robustness experiments

    """
    name = 'static'
    settings = ('mu_cox_scale',)

    def __init__(self, mu_cox_scale=1.0):
        if not mu_cox_scale > 0.0:
            raise ConfigError("mu_cox_scale must be positive")
        self.mu_cox_scale = float(mu_cox_scale)

    def estimates(self, net, card):
        """device -> CalibrationRecord with the round-0 estimates."""
        result = {}
        for inst in net.mosfets:
            params = card.params(inst.model)
            result[inst.name] = estimate_record(
                inst,
                mu_cox=params.mu0cox * self.mu_cox_scale,
                agm=INITIAL_AGM,
                lam=params.lambdal / inst.l,
                vth=params.vth0)
        return result

    def round0(self, request):
        if request.card is None:
            raise ProviderError("The static provider needs a process card.")
        net = request.netlist
        path = reference_plan_path(net.topology)
        with io.open(path, encoding='utf-8') as f:
            text = f.read()
        plan = accept_plan(text, net, request.targets)
        log.debug("Reference plan %s for %s", path, net.name)
        return ProviderResponse(plan, self.estimates(net, request.card))

    def round_n(self, request):
        if request.round_index < 1 or request.previous_plan is None:
            raise ProviderError(
                "Round {0} needs the previous plan; the initial round is "
                "answered by round0.".format(request.round_index))
        plan = accept_plan(request.previous_plan, request.netlist,
                           request.targets)
        return ProviderResponse(plan)
