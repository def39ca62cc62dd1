"""Command-line front end.

    ampsizer run --netlist 2smc_n.sp --targets t180.cfg \\
        --process t180_toy.cfg --provider static
    ampsizer simulate --netlist sized.sp --process t180_toy.cfg
    ampsizer calibrate op.json
    ampsizer plan-exec --plan 2smc.plan --netlist 2smc_n.sp \\
        --targets t180.cfg --process t180_toy.cfg
    ampsizer report runs/2smc-n-001

Shipped netlists and .cfg files may be named without a directory.  Exit
status: 0 success or converged, 1 not converged, 2 usage or configuration
error, 3 runtime error.

"""
import argparse
import io
import json
import logging
import os
import sys

from ampsizer.calibration import (
    CalibrationRecord,
    CalibrationTable,
    extract_device,
    extract_table,
    flag_regions,
    format_table,
)
from ampsizer.config import load_config
from ampsizer.device import ProcessCard
from ampsizer.exceptions import (
    AmpsizerError,
    ConfigError,
    NetlistError,
)
from ampsizer.feedback import METRIC_LABELS, format_metric
from ampsizer.library import config_path, netlist_path, plan_path
from ampsizer.netlist import load_netlist
from ampsizer.orchestrator import (
    CampaignConfig,
    replay_campaign,
    run_campaign,
)
from ampsizer.plan import TARGET_METRICS, DesignTargets
from ampsizer.plan.executor import run_plan
from ampsizer.plan.parser import parse_plan
from ampsizer.provider import PROVIDERS
from ampsizer.provider.static import StaticProvider
from ampsizer.report import build_report
from ampsizer.rundir import next_free_directory
from ampsizer.simulator import OperatingPoint, TestbenchConfig
from ampsizer.simulator.bench import simulate
from ampsizer.utils import dumps, format_eng

__all__ = [
    'EXIT_OK',
    'EXIT_NOT_CONVERGED',
    'EXIT_USAGE',
    'EXIT_RUNTIME',
    'main',
]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _resolve(path, finder):
    """Path as given if it exists, else the shipped file of that name."""
    if path is None or os.path.exists(path):
        return path
    shipped = finder(path)
    if os.path.exists(shipped):
        return shipped
    raise ConfigError("File not found: {0}".format(path))


def _card(args):
    if args.process is None:
        from ampsizer import get_default_process_card
        return get_default_process_card()
    return ProcessCard.load(_resolve(args.process, config_path))


def _testbench(args):
    return TestbenchConfig.from_config(
        load_config(_resolve(args.campaign, config_path) or
                    config_path('campaign')))


def _summary(record):
    values = ', '.join('{0} {1}'.format(
        METRIC_LABELS[m], format_metric(m, record.measured.get(m)))
        for m in TARGET_METRICS if m in record.verdict.checks)
    verdict = 'PASS' if record.verdict.passed else \
        'FAIL ' + ','.join(record.verdict.failures)
    return 'Round {0}: {1} -> {2}'.format(record.index, values, verdict)


def _trial_dir(args, cfg, stem, trial):
    if args.run_dir:
        if args.repeat == 1:
            return args.run_dir
        return '{0}-{1:02d}'.format(args.run_dir, trial)
    return next_free_directory(cfg.run_dir or 'runs', stem)


def cmd_run(args, out):
    if args.repeat < 1:
        raise ConfigError("--repeat must be at least 1")
    if args.replay:
        run_dir = args.run_dir or next_free_directory(
            os.path.dirname(os.path.abspath(args.replay)),
            os.path.basename(os.path.normpath(args.replay)) + '-replay')
        results = [replay_campaign(args.replay, run_dir)]
    else:
        if not args.netlist or not args.targets:
            raise argparse.ArgumentError(
                None, "run needs --netlist and --targets (or --replay)")
        cfg = CampaignConfig.from_files(
            _resolve(args.netlist, netlist_path),
            _resolve(args.targets, config_path),
            process=_resolve(args.process, config_path),
            campaign=_resolve(args.campaign, config_path),
            provider=args.provider)
        stem = os.path.splitext(os.path.basename(args.netlist))[0].lower()
        results = []
        for trial in range(1, args.repeat + 1):
            cfg.run_dir = _trial_dir(args, cfg, stem, trial)
            if args.repeat > 1:
                out.write('Trial {0}/{1}\n'.format(trial, args.repeat))
            results.append(run_campaign(cfg))
    for result in results:
        for record in result.history:
            out.write(_summary(record) + '\n')
        if result.cycle:
            out.write('Rounds {0} and {1} produced the same sizing\n'.format(
                *result.cycle))
        out.write('{0} after {1} simulation(s); run directory {2}\n'.format(
            'Converged' if result.converged else 'Not converged',
            result.rounds_used, result.run_dir))
    if all(r.converged for r in results):
        return EXIT_OK
    return EXIT_NOT_CONVERGED


def cmd_simulate(args, out):
    net = load_netlist(_resolve(args.netlist, netlist_path))
    op, metrics, _ = simulate(net, _card(args), _testbench(args))
    os.makedirs(args.output, exist_ok=True)
    for name, doc in (('op.json', op), ('metrics.json', metrics)):
        with io.open(os.path.join(args.output, name), 'w',
                     encoding='utf-8') as f:
            f.write(dumps(doc) + '\n')
    for metric in TARGET_METRICS:
        out.write('{0}: {1}\n'.format(METRIC_LABELS[metric],
                                      format_metric(metric,
                                                    metrics.get(metric))))
    return EXIT_OK


def _read_json(path):
    try:
        with io.open(path, encoding='utf-8') as f:
            return json.load(f)
    except (IOError, OSError, ValueError) as exc:
        raise ConfigError("Cannot read {0}: {1}".format(path, exc))


def cmd_calibrate(args, out):
    try:
        op = OperatingPoint.from_json(_read_json(args.op))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("Corrupt operating point {0}: {1}".format(
            args.op, exc))
    if args.netlist:
        table = extract_table(op, load_netlist(
            _resolve(args.netlist, netlist_path)))
    else:
        table = CalibrationTable([
            extract_device(dop, dop.w, dop.l, name)
            for name, dop in sorted(op.device_ops.items())])
        table.warnings = flag_regions(table)
    out.write(dumps(table) + '\n' if args.json else format_table(table))
    return EXIT_OK


def _plan_calibration(args, net):
    if args.estimates:
        data = _read_json(args.estimates)
        try:
            if 'rows' in data:
                return CalibrationTable.from_json(data).as_map()
            return dict((k, CalibrationRecord.from_json(v))
                        for k, v in data.items())
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ConfigError("Corrupt calibration {0}: {1}".format(
                args.estimates, exc))
    return StaticProvider().estimates(net, _card(args))


def cmd_plan_exec(args, out):
    net = load_netlist(_resolve(args.netlist, netlist_path))
    with io.open(_resolve(args.plan, plan_path), encoding='utf-8') as f:
        plan = parse_plan(f.read())
    vin = net.get('VIN').value if 'VIN' in net else None
    targets = DesignTargets.from_config(
        load_config(_resolve(args.targets, config_path)),
        supplies=net.supplies, vcm=vin)
    run = run_plan(plan, _plan_calibration(args, net), targets)
    for name, value in run.bindings.items():
        out.write('{0} = {1}\n'.format(name, format_eng(value)))
    out.write('\n')
    dv = run.design_variables
    for device in sorted(dv.widths):
        out.write('{0}: W = {1}, L = {2}\n'.format(
            device, format_eng(dv.widths[device]),
            format_eng(dv.lengths[device])))
    for group in (dv.passives, dv.bias_currents):
        for name in sorted(group):
            out.write('{0} = {1}\n'.format(name, format_eng(group[name])))
    out.write('\n')
    for metric in TARGET_METRICS:
        value = run.predicted.get(metric)
        if value is not None:
            out.write('predicted {0}: {1}\n'.format(
                METRIC_LABELS[metric], format_metric(metric, value)))
    return EXIT_OK


def cmd_report(args, out):
    report = build_report(args.run_dir)
    out.write(report.csv() if args.csv else report.text())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog='ampsizer',
        description="Calibrated, simulation-in-the-loop op-amp sizing.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='store_true',
                        help="debug logging")
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    run = sub.add_parser('run', parents=[common],
                         help="run a sizing campaign")
    run.add_argument('--netlist', help="unsized SPICE netlist")
    run.add_argument('--targets', help="target specification .cfg")
    run.add_argument('--process', help="process card .cfg")
    run.add_argument('--provider', choices=PROVIDERS,
                     help="plan provider (default: provider.name)")
    run.add_argument('--campaign', help="campaign settings .cfg")
    run.add_argument('--run-dir', help="run directory")
    run.add_argument('--replay', metavar='DIR',
                     help="rerun the campaign stored in DIR")
    run.add_argument('--repeat', type=int, default=1, metavar='N',
                     help="run N campaigns in sibling run directories")
    run.set_defaults(func=cmd_run)

    sim = sub.add_parser('simulate', parents=[common],
                         help="simulate a sized netlist")
    sim.add_argument('--netlist', required=True)
    sim.add_argument('--process')
    sim.add_argument('--campaign', help="testbench settings (tb.*)")
    sim.add_argument('-o', '--output', default='.',
                     help="directory for op.json and metrics.json")
    sim.set_defaults(func=cmd_simulate)

    cal = sub.add_parser('calibrate', parents=[common],
                         help="calibration table of a stored op.json")
    cal.add_argument('op', help="op.json")
    cal.add_argument('--netlist', help="netlist fixing the device order")
    cal.add_argument('--json', action='store_true')
    cal.set_defaults(func=cmd_calibrate)

    pex = sub.add_parser('plan-exec', parents=[common],
                         help="execute a plan standalone")
    pex.add_argument('--plan', required=True)
    pex.add_argument('--netlist', required=True)
    pex.add_argument('--targets', required=True)
    pex.add_argument('--process',
                     help="card for estimates when --estimates is absent")
    pex.add_argument('--estimates',
                     help="estimates.json or calibration.json")
    pex.set_defaults(func=cmd_plan_exec)

    rep = sub.add_parser('report', parents=[common],
                         help="report of a run directory")
    rep.add_argument('run_dir')
    rep.add_argument('--csv', action='store_true')
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args, out)
    except argparse.ArgumentError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write('ampsizer: error: {0}\n'.format(exc))
        return EXIT_USAGE
    except (ConfigError, NetlistError) as exc:
        sys.stderr.write('ampsizer: {0}\n'.format(exc))
        return EXIT_USAGE
    except AmpsizerError as exc:
        sys.stderr.write('ampsizer: {0}\n'.format(exc))
        return EXIT_RUNTIME


if __name__ == '__main__':
    sys.exit(main())
