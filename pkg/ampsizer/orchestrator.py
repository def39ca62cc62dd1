"""The sizing campaign: provider, plan execution, simulation, calibration
and feedback, round after round until every base target is met.

Round 0 executes the provider's plan with its initial estimates.  Every
later round re-executes a plan with the parameters extracted from the
previous round's operating point, against design targets inflated by the
previous round's prediction errors.  Convergence is always checked against
the base targets.

"""
from dataclasses import dataclass, field, replace
import io
import logging
import os
import warnings

from ampsizer.calibration import extract_table, format_table
from ampsizer.config import flatten, get_number, load_config
from ampsizer.device import ProcessCard
from ampsizer.exceptions import (
    AmpsizerError,
    CampaignError,
    ConfigError,
    NetlistError,
    PlanError,
    ProviderError,
    SimulationError,
    UnknownDeviceError,
)
from ampsizer.feedback import (
    MarginConfig,
    RoundHistory,
    RoundRecord,
    check_convergence,
    compute_errors,
    derive_design_targets,
)
from ampsizer.library import config_path
from ampsizer.netlist import (
    CAPACITOR,
    DesignVariables,
    apply_design_variables,
    parse_netlist,
)
from ampsizer.plan import DesignTargets
from ampsizer.plan.executor import run_plan
from ampsizer.provider import ProviderRequest, get_provider
from ampsizer.rundir import RunDirectory
from ampsizer.simulator import MetricSet, TestbenchConfig
from ampsizer.simulator.bench import simulate

__all__ = [
    'DEFAULT_MAX_ROUNDS',
    'LOAD_CAPACITOR',
    'CampaignConfig',
    'CampaignResult',
    'run_campaign',
    'replay_campaign',
]

log = logging.getLogger(__name__)

DEFAULT_MAX_ROUNDS = 16

# capacitor that receives the target load capacitance
LOAD_CAPACITOR = 'CL'


def _read(path):
    if not os.path.isfile(path):
        raise ConfigError("File not found: {0}".format(path))
    with io.open(path, encoding='utf-8') as f:
        return f.read()


def _input_common_mode(net, tb):
    try:
        return net.get(tb.input_source).value
    except UnknownDeviceError:
        return None


@dataclass
class CampaignConfig(object):
    """Inputs of a campaign.

        netlist_text: SPICE text of the unsized amplifier
        targets: base DesignTargets
        card: ProcessCard the simulator and static provider use
        provider: 'static' or 'http'
        provider_settings: provider keyword arguments
        max_rounds: simulations allowed, round 0 included
        run_dir: directory the rounds are written to, None to keep nothing
        margins: MarginConfig
        testbench: TestbenchConfig
        netlist_path: where the netlist was read from, informational

    """
    netlist_text: str
    targets: DesignTargets
    card: ProcessCard
    provider: str = 'static'
    provider_settings: dict = field(default_factory=dict)
    max_rounds: int = DEFAULT_MAX_ROUNDS
    run_dir: str = None
    margins: MarginConfig = field(default_factory=MarginConfig)
    testbench: TestbenchConfig = field(default_factory=TestbenchConfig)
    netlist_path: str = None

    def __post_init__(self):
        if isinstance(self.max_rounds, bool) or \
                int(self.max_rounds) != self.max_rounds or \
                self.max_rounds < 1:
            raise ConfigError("max_rounds must be an integer >= 1, got "
                              "{0!r}".format(self.max_rounds))
        self.max_rounds = int(self.max_rounds)

    @classmethod
    def from_files(cls, netlist, targets, process=None, campaign=None,
                   provider=None, run_dir=None):
        """Build a config from files.

            netlist: SPICE netlist path
            targets: target .cfg path
            process: process card .cfg path, the default card when None
            campaign: campaign .cfg path, the shipped defaults when None
            provider: provider name overriding ``provider.name``
            run_dir: run directory overriding ``run_dir``

        """
        text = _read(netlist)
        net = parse_netlist(text)
        data = load_config(campaign or config_path('campaign'))
        tb = TestbenchConfig.from_config(data)
        base = DesignTargets.from_config(
            load_config(targets), supplies=net.supplies,
            vcm=_input_common_mode(net, tb))
        # the transient timestep follows the GBW target unless pinned
        if 'gbw_hz' not in (data.get('tb') or {}):
            tb = replace(tb, gbw_hz=base.gbw_hz_min)
        if process is None:
            from ampsizer import get_default_process_card
            card = get_default_process_card()
        else:
            card = ProcessCard.load(process)
        settings = flatten(data.get('provider') or {})
        name = provider or settings.get('name', 'static')
        settings.pop('name', None)
        max_rounds = get_number(data, 'max_rounds', DEFAULT_MAX_ROUNDS)
        return cls(
            netlist_text=text,
            targets=base,
            card=card,
            provider=str(name),
            provider_settings=settings,
            max_rounds=max_rounds,
            run_dir=run_dir or (str(data['run_dir'])
                                if 'run_dir' in data else None),
            margins=MarginConfig.from_config(data),
            testbench=tb,
            netlist_path=netlist,
        )

    def __json__(self):
        return {
            'netlist_text': self.netlist_text,
            'targets': self.targets.__json__(),
            'card': self.card.__json__(),
            'provider': self.provider,
            'provider_settings': dict(self.provider_settings),
            'max_rounds': self.max_rounds,
            'margins': self.margins.__json__(),
            'testbench': self.testbench.__json__(),
            'netlist_path': self.netlist_path,
        }

    @classmethod
    def from_json(cls, data, run_dir=None):
        try:
            return cls(
                netlist_text=data['netlist_text'],
                targets=DesignTargets.from_json(data['targets']),
                card=ProcessCard.from_json(data['card']),
                provider=data.get('provider', 'static'),
                provider_settings=dict(data.get('provider_settings', {})),
                max_rounds=data.get('max_rounds', DEFAULT_MAX_ROUNDS),
                run_dir=run_dir,
                margins=MarginConfig(**data.get('margins', {})),
                testbench=TestbenchConfig(**data.get('testbench', {})),
                netlist_path=data.get('netlist_path'),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError("Invalid campaign document: {0}".format(exc))


@dataclass
class CampaignResult(object):
    """Outcome of a campaign.

        converged: every base target met in the last round
        rounds_used: simulations run, round 0 included
        final_design: DesignVariables of the last finished round
        final_metrics: MetricSet of the last finished round
        history: RoundHistory
        cycle: (earlier, later) rounds with identical sizing, or None
        run_dir: where the rounds were written

    """
    converged: bool
    rounds_used: int
    final_design: DesignVariables
    final_metrics: MetricSet
    history: RoundHistory
    cycle: tuple = None
    run_dir: str = None

    def __json__(self):
        return {
            'converged': self.converged,
            'rounds_used': self.rounds_used,
            'final_design': self.final_design,
            'final_metrics': self.final_metrics,
            'history': self.history,
            'cycle': list(self.cycle) if self.cycle else None,
        }


class _Campaign(object):

    def __init__(self, cfg, provider=None):
        self.cfg = cfg
        try:
            net = parse_netlist(cfg.netlist_text)
        except NetlistError as exc:
            raise CampaignError(str(exc), round_index=0)
        base = cfg.targets
        if LOAD_CAPACITOR in net and \
                net.get(LOAD_CAPACITOR).kind == CAPACITOR:
            net = net.with_values({LOAD_CAPACITOR: base.cl})
        self.net = net
        self.base = base
        self.provider = provider or get_provider(cfg.provider,
                                                 cfg.provider_settings)
        self.history = RoundHistory()
        self.rundir = None
        if cfg.run_dir:
            self.rundir = RunDirectory(cfg.run_dir).create()
            self.rundir.write_campaign(cfg)

    def abort(self, index, exc):
        log.error("Round %d aborted: %s", index, exc)
        if self.rundir is not None:
            self.rundir.write_failure(index, exc)
        raise CampaignError(str(exc), round_index=index)

    def carry_forward(self, table, calib):
        """Calibration map for the next round; cutoff devices keep their
        last usable record."""
        result, notes = {}, []
        for row in table:
            previous = calib.get(row.device)
            if not row.conducting and previous is not None:
                note = ("{0} in CUTOFF: carrying forward its previous "
                        "calibration".format(row.device))
                warnings.warn(note)
                notes.append(note)
                result[row.device] = previous
            else:
                result[row.device] = row
        return result, notes

    def save(self, index, name, value, as_json=True):
        if self.rundir is None or value is None:
            return
        if as_json:
            self.rundir.write_json(index, name, value)
        else:
            self.rundir.write_text(index, name, value)

    def round(self, index, design, calib, feedback):
        cfg = self.cfg
        request = ProviderRequest(
            round_index=index, netlist=self.net, targets=self.base,
            design_targets=design, card=cfg.card, history=self.history,
            margins=cfg.margins,
            **feedback)
        try:
            response = self.provider.respond(request)
        except ProviderError as exc:
            self.abort(index, exc)
        self.save(index, 'prompt.txt', response.prompt, as_json=False)
        self.save(index, 'plan.dsl', response.text, as_json=False)
        if index == 0:
            if not response.estimates:
                self.abort(index, ProviderError(
                    "The round-0 response carries no estimates."))
            calib = dict(response.estimates)
            self.save(index, 'estimates.json', calib)

        try:
            run = run_plan(response.plan, calib, design)
            self.save(index, 'design.json', run.design_variables)
            sized = apply_design_variables(self.net, run.design_variables)
        except (PlanError, NetlistError) as exc:
            self.abort(index, exc)
        self.save(index, 'netlist.sp', sized.serialize(), as_json=False)

        try:
            op, measured, _ = simulate(sized, cfg.card, cfg.testbench)
        except SimulationError as exc:
            self.abort(index, exc)
        self.save(index, 'op.json', op)
        self.save(index, 'metrics.json', measured)

        try:
            errors = compute_errors(run.predicted, measured,
                                    sorted(self.base.metrics()))
            table = extract_table(op, sized)
        except AmpsizerError as exc:
            self.abort(index, exc)
        self.save(index, 'calibration.txt', format_table(table),
                  as_json=False)
        self.save(index, 'calibration.json', table)
        verdict = check_convergence(measured, self.base)
        next_calib, notes = self.carry_forward(table, calib)
        record = RoundRecord(
            index=index, design_targets=design,
            design_variables=run.design_variables, predicted=run.predicted,
            measured=measured, errors=tuple(errors), verdict=verdict,
            warnings=tuple(table.warnings) + tuple(notes))
        self.history.append(record)
        if self.rundir is not None:
            self.rundir.write_errors(record)
        log.info("Round %d: %s", index, 'PASS' if verdict.passed else
                 'FAIL ' + ', '.join(verdict.failures))
        return record, response, table, next_calib

    def __call__(self):
        cfg = self.cfg
        design, calib, feedback = self.base, None, {}
        cycle = None
        for index in range(cfg.max_rounds):
            record, response, table, calib = self.round(
                index, design, calib, feedback)
            if record.verdict.passed:
                break
            if cycle is None:
                cycle = self.history.recurrence()
                if cycle is not None:
                    log.warning("Rounds %d and %d produced the same sizing",
                                *cycle)
            design = derive_design_targets(self.base, record.errors,
                                           cfg.margins)
            feedback = dict(previous_plan=response.text, calibration=table,
                            errors=list(record.errors),
                            warnings=list(record.warnings))
        last = self.history.latest
        result = CampaignResult(
            converged=last.verdict.passed,
            rounds_used=len(self.history),
            final_design=last.design_variables,
            final_metrics=last.measured,
            history=self.history,
            cycle=cycle,
            run_dir=cfg.run_dir)
        if self.rundir is not None:
            self.rundir.write_result(result)
        log.info("%s after %d simulation(s)", 'Converged' if result.converged
                 else 'Not converged', result.rounds_used)
        return result


def run_campaign(cfg, provider=None):
    """Run rounds until the base targets are met or max_rounds is spent.

        cfg: CampaignConfig
        provider: Provider instance, built from cfg.provider when None

    Any round that cannot finish aborts the campaign with a CampaignError
    carrying the round index; what the round produced so far is kept in
    the run directory.

    """
    return _Campaign(cfg, provider)()


def replay_campaign(path, run_dir=None, provider=None):
    """Run the campaign stored in a run directory again.

        path: run directory holding campaign.json
        run_dir: where the replay is written, None to keep nothing

    """
    data = RunDirectory(path).read_campaign()
    return run_campaign(CampaignConfig.from_json(data, run_dir=run_dir),
                        provider)
