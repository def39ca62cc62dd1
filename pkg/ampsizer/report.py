"""Reports built from a run directory alone."""
import csv
from dataclasses import dataclass
import io

from ampsizer.calibration import format_table
from ampsizer.exceptions import NetlistError, RunDirectoryError
from ampsizer.feedback import METRIC_LABELS, format_metric
from ampsizer.netlist import parse_netlist
from ampsizer.plan import TARGET_METRICS, DesignTargets
from ampsizer.rundir import RunDirectory

__all__ = [
    'ReportBundle',
    'build_report',
    'render_table',
    'render_csv',
]


def render_table(header, rows):
    """Aligned plain-text table."""
    lines = [list(header)] + [list(row) for row in rows]
    widths = [max(len(line[i]) for line in lines)
              for i in range(len(header))]
    return '\n'.join(' '.join(cell.ljust(w) for cell, w in zip(line, widths))
                     .rstrip() for line in lines) + '\n'


def render_csv(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


@dataclass
class ReportBundle(object):
    """Convergence, trajectory and calibration tables of one campaign.

        convergence: (header, rows), one row: topology, rounds, verdict and
            final metrics
        trajectory: (header, rows), one row per round with measured values,
            pass/fail per metric and the design-target inflation used
        calibration: round index -> rendered calibration table

    """
    convergence: tuple
    trajectory: tuple
    calibration: dict

    def text(self):
        parts = ['Convergence', render_table(*self.convergence),
                 'Trajectory', render_table(*self.trajectory)]
        for index in sorted(self.calibration):
            parts.append('Calibration, round {0}'.format(index))
            parts.append(self.calibration[index])
        return '\n'.join(parts)

    def csv(self):
        return (render_csv(*self.convergence) + '\n' +
                render_csv(*self.trajectory))

    def __str__(self):
        return self.text()


def _inflation(metric, design, base):
    d, b = design.get(metric), base.get(metric)
    if d is None or b is None or d == b:
        return '-'
    if metric in ('av', 'pm'):
        return '{0:+.2f}'.format(d - b)
    return 'x{0:.3f}'.format(d / b)


def build_report(path):
    """ReportBundle of the campaign stored in a run directory."""
    rundir = RunDirectory(path)
    history = rundir.load_history()
    campaign = rundir.read_campaign()
    try:
        base = DesignTargets.from_json(campaign['targets'])
        topology = parse_netlist(campaign['netlist_text']).name
    except (KeyError, TypeError, ValueError, NetlistError):
        raise RunDirectoryError("Corrupt campaign document", path=path)
    metrics = [m for m in TARGET_METRICS if base.get(m) is not None]
    last = history.latest

    header = ['Topology', 'Rounds', 'Converged'] + [
        METRIC_LABELS[m] for m in metrics]
    rows = [[topology, str(len(history)),
             'yes' if last.verdict.passed else 'no'] + [
        format_metric(m, last.measured.get(m)) for m in metrics]]
    convergence = (header, rows)

    header = ['Round'] + [METRIC_LABELS[m] for m in metrics] + [
        'Verdict', 'Inflation']
    rows = []
    for record in history:
        cells = [str(record.index)]
        for m in metrics:
            ok = record.verdict.checks.get(m)
            cells.append('{0} {1}'.format(
                format_metric(m, record.measured.get(m)),
                'ok' if ok else 'FAIL'))
        cells.append('PASS' if record.verdict.passed else 'FAIL')
        inflation = ['{0} {1}'.format(m, _inflation(
            m, record.design_targets, base)) for m in metrics
            if _inflation(m, record.design_targets, base) != '-']
        cells.append(', '.join(inflation) or '-')
        rows.append(cells)
    trajectory = (header, rows)

    calibration = {}
    for record in history:
        if rundir.has(record.index, 'calibration.json'):
            calibration[record.index] = format_table(
                rundir.load_calibration(record.index))
    return ReportBundle(convergence, trajectory, calibration)
