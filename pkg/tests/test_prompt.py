import io

import pytest

from ampsizer.calibration import CalibrationTable
from ampsizer.device import ProcessCard
from ampsizer.exceptions import PromptAssemblyError
from ampsizer.feedback import (
    DEGREES,
    MarginConfig,
    PredictionError,
    RoundHistory,
    RoundRecord,
    Verdict,
    compute_errors,
    derive_design_targets,
)
from ampsizer.library import config_path, netlist_path, reference_plan_path
from ampsizer.netlist import DesignVariables, load_netlist
from ampsizer.plan import DesignTargets, PredictedMetrics
from ampsizer.prompt import RuleSet, get_default_rules
from ampsizer.prompt.build import (
    SECTION_HEADERS,
    assemble_round0,
    assemble_round_n,
    retry_prompt,
)
from ampsizer.provider import ProviderRequest
from ampsizer.provider.static import StaticProvider
from ampsizer.simulator import MetricSet

RULE_NAMES = ('circularity', 'classification', 'dc_consistency',
              'diagnostics', 'estimates', 'grammar', 'margins', 'parasitics',
              'pm_exception', 'role', 'sections', 'update')


@pytest.fixture
def net():
    return load_netlist(netlist_path('2smc_n'))


@pytest.fixture
def targets():
    return DesignTargets(av_db_min=60.0, gbw_hz_min=100e6, pm_deg_min=60.0,
                         sr_pos_min=50e6, sr_neg_min=50e6, vcm=0.2)


@pytest.fixture
def calibration(net):
    card = ProcessCard.load(config_path('t180_toy'))
    return CalibrationTable(list(StaticProvider().estimates(net, card)
                                 .values()))


@pytest.fixture
def plan_text():
    with io.open(reference_plan_path('2SMC'), encoding='utf-8') as f:
        return f.read()


def round_request(net, targets, calibration, plan_text, errors, **kwargs):
    return ProviderRequest(
        round_index=kwargs.pop('round_index', 1), netlist=net,
        targets=targets,
        design_targets=derive_design_targets(targets, errors),
        previous_plan=plan_text, calibration=calibration, errors=errors,
        **kwargs)


def write_rules(directory, **overrides):
    version = directory.mkdir('v1')
    for name in RULE_NAMES:
        version.join(name + '.txt').write(overrides.get(name, name + ' text'))
    return RuleSet('v1', str(directory))


class DescribeRound0:
    def it_asks_for_the_seven_sections_once_each(self, net, targets):
        text = assemble_round0(net, targets).text
        for header in SECTION_HEADERS:
            assert text.count(header) == 1
        positions = [text.index(h) for h in SECTION_HEADERS]
        assert positions == sorted(positions)

    def it_names_its_parts_in_order(self, net, targets):
        bundle = assemble_round0(net, targets)
        assert bundle.names == ['task', 'netlist', 'targets', 'rules',
                                'grammar', 'format']

    def it_covers_the_text_with_contiguous_spans(self, net, targets):
        bundle = assemble_round0(net, targets)
        assert bundle.sections[0][1] == 0
        assert bundle.sections[-1][2] == len(bundle.text)
        for (_, _, end), (_, start, _) in zip(bundle.sections,
                                              bundle.sections[1:]):
            assert end == start

    def it_lists_the_targets(self, net, targets):
        section = assemble_round0(net, targets).section('targets')
        assert '- Gain: ≥ 60 dB' in section
        assert '- GBW: ≥ 100 MHz' in section
        assert '- Phase margin: ≥ 60°' in section
        assert '- SR+: ≥ 50 V/µs' in section
        assert '- Load capacitance: 1 pF' in section
        assert '- Supplies: VDD = 0.9 V, VSS = -0.9 V' in section
        assert '- Input common mode: 0.2 V' in section

    def it_omits_an_unset_power_bound(self, net, targets):
        assert 'Power' not in assemble_round0(net, targets).section('targets')
        bounded = targets.with_metrics({'power': 1e-3})
        assert '- Power: ≤ 1 mW' in \
            assemble_round0(net, bounded).section('targets')

    def it_embeds_the_netlist(self, net, targets):
        section = assemble_round0(net, targets).section('netlist')
        assert '```spice\n.title 2SMC-N\n' in section

    def it_includes_the_rule_assets(self, net, targets):
        rules = get_default_rules()
        text = assemble_round0(net, targets).text
        for name in ('role', 'classification', 'circularity',
                     'dc_consistency', 'parasitics', 'grammar', 'estimates'):
            assert rules.get(name).strip() in text

    def it_steers_parasitics_toward_a_larger_overdrive(self, net, targets):
        rules = assemble_round0(net, targets).section('rules')
        assert '(C_gs, C_db)' in rules
        assert 'bandwidth and phase margin' in rules
        assert 'sizing for a larger overdrive at the same current' in rules
        assert 'prefer raising current' not in rules

    def it_is_deterministic(self, net, targets):
        assert assemble_round0(net, targets) == assemble_round0(net, targets)

    def it_refuses_empty_rule_assets(self, net, targets, tmpdir):
        rules = write_rules(tmpdir, role='  \n')
        with pytest.raises(PromptAssemblyError) as e:
            assemble_round0(net, targets, rules)
        assert "'role'" in str(e.value)


class DescribeRoundN:
    def it_states_the_inflated_target(self, net, targets, calibration,
                                      plan_text):
        errors = compute_errors(
            PredictedMetrics(gbw_hz=187e6), MetricSet(gbw_hz=100e6), ['gbw'])
        bundle = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors))
        assert '- GBW over-predicted by +87.0%: design for 1.87× target ' \
            '(187 MHz).' in bundle.section('margins')

    def it_states_gain_margins_in_db(self, net, targets, calibration,
                                     plan_text):
        errors = compute_errors(
            PredictedMetrics(av_db=66.0), MetricSet(av_db=60.0), ['av'])
        margins = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors)).section('margins')
        assert '- Gain over-predicted by +6.00 dB: design for target + ' \
            '6.00 dB (66 dB).' in margins

    def it_says_when_no_margin_applies(self, net, targets, calibration,
                                       plan_text):
        errors = compute_errors(
            PredictedMetrics(gbw_hz=90e6), MetricSet(gbw_hz=100e6), ['gbw'])
        margins = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors)).section('margins')
        assert 'No metric was over-predicted; the base targets stand.' in \
            margins
        assert 'This round:' not in margins

    def it_trusts_a_passing_phase_margin_predicted_far_too_low(
            self, net, targets, calibration, plan_text):
        errors = [PredictionError('pm', DEGREES, 5.0, 74.0, -69.0)]
        margins = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors)).section('margins')
        assert 'Phase margin predicted at 5.0° but measured 74.0° ' \
            'passes' in margins
        assert 'trust the measured value' in margins

    def it_keeps_quiet_when_the_measured_phase_margin_fails(
            self, net, targets, calibration, plan_text):
        errors = [PredictionError('pm', DEGREES, 5.0, 50.0, -45.0)]
        margins = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors)).section('margins')
        assert 'trust the measured value' not in margins

    def it_skips_the_exception_for_a_plausible_prediction(
            self, net, targets, calibration, plan_text):
        errors = [PredictionError('pm', DEGREES, 65.0, 62.0, 3.0)]
        margins = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors)).section('margins')
        assert 'trust the measured value' not in margins
        assert '- Phase margin over-predicted by +3.00°' in margins

    def it_reads_the_campaign_threshold(self, net, targets, calibration,
                                        plan_text):
        errors = [PredictionError('pm', DEGREES, 5.0, 74.0, -69.0)]
        margins = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors,
            margins=MarginConfig(pm_catastrophe_threshold=0.0))
        ).section('margins')
        assert 'trust the measured value' not in margins

    def it_raises_an_over_predicted_power_bound(self, net, calibration,
                                                plan_text):
        targets = DesignTargets(60, 1e8, 60, 5e7, 5e7, power_max=1e-3)
        errors = compute_errors(PredictedMetrics(power_w=1.5e-3),
                                MetricSet(power_w=1e-3), ['power'])
        margins = assemble_round_n(round_request(
            net, targets, calibration, plan_text, errors)).section('margins')
        assert '- Power over-predicted by +50.0%: design for 1.50× target' \
            in margins

    def it_forwards_warnings(self, net, targets, calibration, plan_text):
        bundle = assemble_round_n(round_request(
            net, targets, calibration, plan_text, [],
            warnings=['M5 in TRIODE (|Vds|=56mV < Vov=83mV)']))
        assert 'WARNING: M5 in TRIODE (|Vds|=56mV < Vov=83mV)' in \
            bundle.section('warnings')

    def it_skips_empty_optional_sections(self, net, targets, calibration,
                                         plan_text):
        bundle = assemble_round_n(round_request(
            net, targets, calibration, plan_text, []))
        assert 'warnings' not in bundle.names
        assert 'history' not in bundle.names

    def it_carries_the_previous_plan_and_calibration(
            self, net, targets, calibration, plan_text):
        bundle = assemble_round_n(round_request(
            net, targets, calibration, plan_text, [], round_index=3))
        assert bundle.section('task').startswith('Round 3.')
        assert plan_text.strip() in bundle.section('plan')
        assert 'round 2 operating point' in bundle.section('calibration')

    def it_tabulates_the_history(self, net, targets, calibration, plan_text):
        history = RoundHistory()
        history.append(RoundRecord(
            index=0, design_targets=targets,
            design_variables=DesignVariables(),
            predicted=PredictedMetrics(), measured=MetricSet(gbw_hz=80e6),
            errors=(), verdict=Verdict({'gbw': False, 'av': True})))
        section = assemble_round_n(round_request(
            net, targets, calibration, plan_text, [],
            history=history)).section('history')
        assert 'FAIL gbw' in section
        assert '80 MHz' in section

    def it_is_deterministic(self, net, targets, calibration, plan_text):
        errors = compute_errors(
            PredictedMetrics(gbw_hz=187e6), MetricSet(gbw_hz=100e6), ['gbw'])
        request = round_request(net, targets, calibration, plan_text, errors)
        assert assemble_round_n(request).text == \
            assemble_round_n(request).text


class DescribeRetryPrompt:
    def it_appends_the_diagnostics(self, net, targets):
        bundle = assemble_round0(net, targets)
        retry = retry_prompt(bundle, ['M9 is not classified'])
        assert retry.text.startswith(bundle.text)
        assert retry.names[-1] == 'retry'
        assert '- M9 is not classified' in retry.section('retry')


class DescribeRuleSet:
    def it_loads_the_shipped_assets(self):
        rules = RuleSet()
        assert rules.version == 'v1'
        assert set(RULE_NAMES) <= set(rules.names)

    def it_falls_back_to_the_latest_version(self, tmpdir):
        write_rules(tmpdir)
        with pytest.warns(UserWarning):
            rules = RuleSet('v7', str(tmpdir))
        assert rules.version == 'v1'

    def it_raises_without_assets(self, tmpdir):
        with pytest.raises(PromptAssemblyError):
            RuleSet('v1', str(tmpdir.join('none')))

    def it_raises_for_missing_assets(self, tmpdir):
        rules = write_rules(tmpdir)
        assert 'role' in rules
        with pytest.raises(PromptAssemblyError):
            rules.get('absent')
