import json

import pytest

from ampsizer.config import parse_config
from ampsizer.exceptions import FeedbackError
from ampsizer.feedback import (
    DEGREES,
    LINEAR,
    LOG_DB,
    MarginConfig,
    PredictionError,
    RoundHistory,
    RoundRecord,
    Verdict,
    check_convergence,
    compute_errors,
    derive_design_targets,
    format_errors,
    format_metric,
    trusts_measured_pm,
)
from ampsizer.netlist import DesignVariables
from ampsizer.plan import DesignTargets, PredictedMetrics
from ampsizer.simulator import MetricSet
from ampsizer.utils import dumps


@pytest.fixture
def base():
    return DesignTargets(av_db_min=60.0, gbw_hz_min=100e6, pm_deg_min=60.0,
                         sr_pos_min=50e6, sr_neg_min=50e6)


def measured(**kwargs):
    values = dict(av_db=60.0, gbw_hz=100e6, pm_deg=60.0, sr_pos=50e6,
                  sr_neg=50e6, power_w=1e-3)
    values.update(kwargs)
    return MetricSet(**values)


def predicted(**kwargs):
    return PredictedMetrics(**measured(**kwargs).__json__())


def record(index, widths=None):
    return RoundRecord(
        index=index,
        design_targets=DesignTargets(60, 1e8, 60, 5e7, 5e7),
        design_variables=DesignVariables(widths=dict(widths or {})),
        predicted=predicted(),
        measured=measured(),
        errors=(),
        verdict=Verdict({'av': True}))


class DescribeComputeErrors:
    def it_measures_linear_errors_in_percent(self):
        errors = compute_errors(predicted(gbw_hz=187e6), measured(),
                                ['gbw'])
        assert errors[0].kind == LINEAR
        assert errors[0].error == pytest.approx(87.0)
        assert errors[0].over_predicted

    def it_measures_gain_in_db_and_phase_in_degrees(self):
        av, pm = compute_errors(predicted(av_db=66.0, pm_deg=55.0),
                                measured(), ['av', 'pm'])
        assert (av.kind, av.error) == (LOG_DB, 6.0)
        assert (pm.kind, pm.error) == (DEGREES, -5.0)
        assert not pm.over_predicted

    def it_leaves_the_error_undefined_for_a_zero_measurement(self):
        err, = compute_errors(predicted(), measured(sr_pos=0.0), ['sr_pos'])
        assert err.error is None
        assert not err.defined
        assert err.over_predicted

    def it_compares_every_shared_metric_by_default(self):
        errors = compute_errors(predicted(power_w=None), measured())
        assert [e.metric for e in errors] == [
            'av', 'gbw', 'pm', 'sr_pos', 'sr_neg']

    def it_raises_for_missing_metrics(self):
        with pytest.raises(FeedbackError):
            compute_errors(predicted(pm_deg=None), measured(), ['pm'])


class DescribeDeriveDesignTargets:
    def it_inflates_over_predicted_targets_by_the_error(self, base):
        errors = compute_errors(
            predicted(gbw_hz=150e6, av_db=70.0, pm_deg=70.0),
            measured(av_db=64.0, pm_deg=65.0), ['gbw', 'av', 'pm'])
        design = derive_design_targets(base, errors)
        assert design.gbw_hz_min == pytest.approx(150e6)
        assert design.av_db_min == pytest.approx(66.0)
        assert design.pm_deg_min == pytest.approx(65.0)
        assert design.sr_pos_min == base.sr_pos_min

    def it_caps_the_margins(self, base):
        errors = compute_errors(
            predicted(gbw_hz=500e6, av_db=90.0, pm_deg=100.0),
            measured(), ['gbw', 'av', 'pm'])
        design = derive_design_targets(base, errors)
        assert design.gbw_hz_min == pytest.approx(300e6)
        assert design.av_db_min == pytest.approx(72.0)
        assert design.pm_deg_min == pytest.approx(80.0)

    def it_leaves_under_predicted_targets_unchanged(self, base):
        errors = compute_errors(predicted(gbw_hz=80e6, av_db=50.0),
                                measured(), ['gbw', 'av'])
        assert derive_design_targets(base, errors) is base

    def it_applies_the_full_cap_to_an_undefined_error(self, base):
        errors = compute_errors(predicted(), measured(sr_pos=0.0),
                                ['sr_pos'])
        design = derive_design_targets(base, errors)
        assert design.sr_pos_min == pytest.approx(150e6)

    def it_trusts_a_passing_pm_below_the_catastrophe_threshold(self):
        base = DesignTargets(60, 1e8, 10, 5e7, 5e7)
        errors = [PredictionError('pm', DEGREES, 15.0, 12.0, 3.0)]
        assert derive_design_targets(base, errors).pm_deg_min == 10.0
        strict = MarginConfig(pm_catastrophe_threshold=0.0)
        assert derive_design_targets(base, errors, strict).pm_deg_min == \
            pytest.approx(13.0)

    def it_keeps_an_under_predicted_power_bound(self):
        base = DesignTargets(60, 1e8, 60, 5e7, 5e7, power_max=1e-3)
        errors = compute_errors(predicted(power_w=0.5e-3), measured(),
                                ['power'])
        assert derive_design_targets(base, errors) is base

    def it_raises_an_over_predicted_power_bound(self):
        base = DesignTargets(60, 1e8, 60, 5e7, 5e7, power_max=1e-3)
        errors = compute_errors(predicted(power_w=2e-3), measured(),
                                ['power'])
        design = derive_design_targets(base, errors)
        assert design.power_max == pytest.approx(2e-3)
        assert design.gbw_hz_min == base.gbw_hz_min

    def it_caps_the_power_bound_like_the_minima(self):
        base = DesignTargets(60, 1e8, 60, 5e7, 5e7, power_max=1e-3)
        errors = compute_errors(predicted(power_w=10e-3), measured(),
                                ['power'])
        assert derive_design_targets(base, errors).power_max == \
            pytest.approx(3e-3)

    def it_trusts_a_passing_pm_predicted_far_too_low(self, base):
        err = PredictionError('pm', DEGREES, 5.0, 74.0, -69.0)
        assert trusts_measured_pm(err, base)
        assert not trusts_measured_pm(
            PredictionError('pm', DEGREES, 5.0, 50.0, -45.0), base)
        assert not trusts_measured_pm(err, base, MarginConfig(
            pm_catastrophe_threshold=0.0))

    def it_skips_metrics_without_a_target(self, base):
        errors = compute_errors(predicted(power_w=2e-3),
                                measured(power_w=0.5e-3), ['power'])
        assert derive_design_targets(base, errors) is base


class DescribeMarginConfig:
    def it_reads_margin_keys(self):
        cfg = MarginConfig.from_config(parse_config("margin.db_cap = 6"))
        assert cfg.db_cap == 6.0
        assert cfg.linear_cap == 200.0

    def it_rejects_negative_caps(self):
        with pytest.raises(FeedbackError):
            MarginConfig(deg_cap=-1.0)


class DescribeCheckConvergence:
    def it_passes_metrics_exactly_at_target(self, base):
        verdict = check_convergence(measured(), base)
        assert verdict.passed
        assert bool(verdict)
        assert sorted(verdict.checks) == [
            'av', 'gbw', 'pm', 'sr_neg', 'sr_pos']

    def it_lists_failing_metrics(self, base):
        verdict = check_convergence(measured(gbw_hz=99.99e6, pm_deg=59.0),
                                    base)
        assert not verdict.passed
        assert verdict.failures == ['gbw', 'pm']

    def it_fails_missing_measurements(self, base):
        assert check_convergence(measured(sr_neg=None),
                                 base).failures == ['sr_neg']

    def it_treats_power_as_an_upper_bound(self):
        base = DesignTargets(60, 1e8, 60, 5e7, 5e7, power_max=1e-3)
        assert check_convergence(measured(power_w=1e-3), base).passed
        assert check_convergence(measured(power_w=1.1e-3),
                                 base).failures == ['power']


class DescribeFormatting:
    def it_formats_metrics_for_display(self):
        assert format_metric('gbw', 100e6) == '100 MHz'
        assert format_metric('av', 60.5) == '60.5 dB'
        assert format_metric('pm', 74.8) == '74.8°'
        assert format_metric('power', 1e-3) == '1 mW'
        assert format_metric('sr_pos', None) == '-'

    def it_tabulates_errors(self):
        errors = compute_errors(predicted(gbw_hz=187e6),
                                measured(sr_pos=0.0), ['gbw', 'sr_pos'])
        lines = format_errors(errors).splitlines()
        assert lines[0].split() == ['Metric', 'Predicted', 'Measured',
                                    'Error']
        assert lines[1].split()[0] == 'gbw'
        assert lines[1].endswith('+87.00 %')
        assert lines[2].endswith('undefined')


class DescribeRoundHistory:
    def it_appends_rounds_in_order(self):
        history = RoundHistory()
        history.append(record(0))
        history.append(record(1))
        assert len(history) == 2
        assert history.latest.index == 1
        assert [r.index for r in history] == [0, 1]

    def it_refuses_rounds_out_of_order(self):
        history = RoundHistory()
        with pytest.raises(FeedbackError):
            history.append(record(1))

    def it_finds_a_sizing_seen_in_non_adjacent_rounds(self):
        history = RoundHistory()
        for index, w in enumerate((1e-6, 2e-6, 1e-6)):
            history.append(record(index, {'M1': w}))
        assert history.recurrence() == (0, 2)

    def it_ignores_adjacent_repeats(self):
        history = RoundHistory()
        for index in range(2):
            history.append(record(index, {'M1': 1e-6}))
        assert history.recurrence() is None

    def it_round_trips_through_json(self):
        history = RoundHistory()
        history.append(record(0, {'M1': 1e-6}))
        restored = RoundHistory.from_json(json.loads(dumps(history)))
        assert restored.rounds == history.rounds
