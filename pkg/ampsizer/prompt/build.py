"""Round-0 and round-N prompt texts.

Both builders are pure: the same inputs give byte-identical text.
"""
from ampsizer.calibration import format_table
from ampsizer.feedback import (
    DEGREES,
    LINEAR,
    LOG_DB,
    METRIC_LABELS,
    UPPER_BOUNDS,
    format_errors,
    format_metric,
    trusts_measured_pm,
)
from ampsizer.plan import TARGET_METRICS
from ampsizer.prompt import PromptBundle, get_default_rules

__all__ = [
    'SECTION_HEADERS',
    'assemble_round0',
    'assemble_round_n',
    'retry_prompt',
]

SECTION_HEADERS = (
    '## 1. Device Roles',
    '## 2. Device Constraints',
    '## 3. Signal Path',
    '## 4. Design Equations',
    '## 5. DC Bias Verification',
    '## 6. DC OP Consistency',
    '## 7. Plan Code',
)


class _Builder(object):

    def __init__(self):
        self.parts = []

    def add(self, name, text):
        self.parts.append((name, text.rstrip('\n') + '\n\n'))

    def build(self):
        sections, text, pos = [], [], 0
        for name, part in self.parts:
            sections.append((name, pos, pos + len(part)))
            text.append(part)
            pos += len(part)
        return PromptBundle(''.join(text), tuple(sections))


def _target_lines(targets):
    lines = []
    for metric in TARGET_METRICS:
        value = targets.get(metric)
        if value is None:
            continue
        bound = '≤' if metric in UPPER_BOUNDS else '≥'
        lines.append('- {0}: {1} {2}'.format(
            METRIC_LABELS[metric], bound, format_metric(metric, value)))
    lines.append('- Load capacitance: {0:g} pF'.format(targets.cl * 1e12))
    lines.append('- Supplies: VDD = {0:g} V, VSS = {1:g} V'.format(
        targets.vdd, targets.vss))
    lines.append('- Input common mode: {0:g} V'.format(targets.common_mode))
    return lines


def _netlist(net):
    return '# Netlist\n\n```spice\n{0}```'.format(net.serialize())


def assemble_round0(net, targets, rules=None):
    """Prompt asking for the first plan and the initial estimates.

        net: Netlist to size
        targets: DesignTargets
        rules: RuleSet, the shipped one when None

    """
    rules = rules or get_default_rules()
    b = _Builder()
    b.add('task', rules.get('role'))
    b.add('netlist', _netlist(net))
    b.add('targets', '# Target Specifications\n\nTopology {0}, all in a '
          'unity-gain configuration.\n\n{1}'.format(
              net.name, '\n'.join(_target_lines(targets))))
    b.add('rules', '# Design Rules\n\n' + '\n'.join((
        rules.get('classification'), rules.get('circularity'),
        rules.get('dc_consistency'), rules.get('parasitics'))))
    b.add('grammar', '# Plan Language\n\n' + rules.get('grammar'))
    b.add('format', '# Response Format\n\n' + rules.get('sections') +
          '\n' + rules.get('estimates'))
    return b.build()


def _margin_lines(errors, base, design):
    lines = []
    for err in errors:
        label = METRIC_LABELS[err.metric]
        target, value = base.get(err.metric), design.get(err.metric)
        if target is None:
            continue
        if not err.over_predicted:
            continue
        if err.kind == LINEAR:
            error = 'undefined' if err.error is None \
                else '{0:+.1f}%'.format(err.error)
            lines.append('- {0} over-predicted by {1}: design for {2:.2f}× '
                         'target ({3}).'.format(
                             label, error, value / target,
                             format_metric(err.metric, value)))
        elif err.kind == LOG_DB:
            lines.append('- {0} over-predicted by {1:+.2f} dB: design for '
                         'target + {2:.2f} dB ({3}).'.format(
                             label, err.error, value - target,
                             format_metric(err.metric, value)))
        elif err.kind == DEGREES and value > target:
            lines.append('- {0} over-predicted by {1:+.2f}°: design for '
                         'target + {2:.2f}° ({3}).'.format(
                             label, err.error, value - target,
                             format_metric(err.metric, value)))
    return lines


def _pm_exception(errors, base, margins):
    for err in errors:
        if trusts_measured_pm(err, base, margins):
            return ('- Phase margin predicted at {0:.1f}° but measured '
                    '{1:.1f}° passes: trust the measured value, no phase-'
                    'margin margin this round.'.format(
                        err.predicted, err.measured))
    return None


def _history_table(history, base):
    metrics = [m for m in TARGET_METRICS if base.get(m) is not None]
    header = ['Round'] + [METRIC_LABELS[m] for m in metrics] + ['Verdict']
    rows = [header]
    for record in history:
        verdict = 'PASS' if record.verdict.passed else \
            'FAIL ' + ','.join(record.verdict.failures)
        rows.append([str(record.index)] + [
            format_metric(m, record.measured.get(m)) for m in metrics] +
            [verdict])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return '\n'.join(' '.join(c.ljust(w) for c, w in zip(r, widths))
                     .rstrip() for r in rows)


def assemble_round_n(request, rules=None):
    """Prompt asking for an updated plan after a simulated round.

        request: ProviderRequest with round_index >= 1
        rules: RuleSet, the shipped one when None

    """
    rules = rules or get_default_rules()
    base, design = request.targets, request.design_targets
    b = _Builder()
    b.add('task', 'Round {0}.\n\n{1}'.format(
        request.round_index, rules.get('update')))
    b.add('netlist', _netlist(request.netlist))
    b.add('targets', '# Target Specifications\n\n{0}'.format(
        '\n'.join(_target_lines(base))))
    b.add('plan', '# Previous Plan\n\n```plan\n{0}```'.format(
        request.previous_plan.rstrip('\n') + '\n'))
    b.add('calibration', '# Calibration\n\nRecalibrated from the round {0} '
          'operating point:\n\n```\n{1}```'.format(
              request.round_index - 1, format_table(request.calibration)))
    b.add('errors', '# Predicted vs Measured\n\n```\n{0}```'.format(
        format_errors(request.errors)))
    lines = _margin_lines(request.errors, base, design)
    margins = rules.get('margins') + '\n'
    if lines:
        margins += 'This round:\n' + '\n'.join(lines) + '\n'
    else:
        margins += 'No metric was over-predicted; the base targets stand.\n'
    exception = _pm_exception(request.errors, base, request.margins)
    if exception:
        margins += '\n' + rules.get('pm_exception') + exception + '\n'
    b.add('margins', '# Margins\n\n' + margins)
    if request.warnings:
        b.add('warnings', '# Warnings\n\n' + '\n'.join(
            'WARNING: ' + w for w in request.warnings))
    if request.history is not None and len(request.history):
        b.add('history', '# History\n\n```\n{0}\n```'.format(
            _history_table(request.history, base)))
    b.add('diagnostics', rules.get('diagnostics'))
    b.add('grammar', '# Plan Language\n\n' + rules.get('grammar'))
    b.add('format', '# Response Format\n\nReturn the complete updated plan '
          'in a single fenced block labeled plan.')
    return b.build()


def retry_prompt(bundle, diagnostics):
    """The bundle with a rejection section appended."""
    b = _Builder()
    b.parts.extend((name, bundle.text[start:end])
                   for name, start, end in bundle.sections)
    b.add('retry', '# Rejected\n\nYour last plan was rejected:\n\n' +
          '\n'.join('- ' + d for d in diagnostics) +
          '\n\nReturn a corrected plan.')
    return b.build()
