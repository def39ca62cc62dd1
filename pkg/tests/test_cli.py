import io
import json
import os

import pytest

import ampsizer
from ampsizer.cli import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_USAGE,
    build_parser,
    main,
)


def setup_module(module):
    ampsizer.set_default_process_card(None)


def teardown_module(module):
    ampsizer.set_default_process_card(None)


def run(*argv):
    out = io.StringIO()
    return main(list(argv), out), out.getvalue()


@pytest.fixture
def simulated(tmpdir):
    output = str(tmpdir.join('sim'))
    code, text = run('simulate', '--netlist', '2smc_n', '--process',
                     't180_toy', '-o', output)
    assert code == EXIT_OK
    return output, text


class DescribeParser:
    def it_requires_a_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def it_reads_run_options(self):
        args = build_parser().parse_args([
            'run', '--netlist', '2smc_n.sp', '--targets', 't180.cfg',
            '--provider', 'http', '--repeat', '3'])
        assert (args.netlist, args.provider, args.repeat) == \
            ('2smc_n.sp', 'http', 3)


class DescribeExitCodes:
    def it_returns_usage_for_bad_arguments(self):
        assert run()[0] == EXIT_USAGE
        assert run('run', '--provider', 'oracle')[0] == EXIT_USAGE

    def it_needs_a_netlist_and_targets_to_run(self):
        assert run('run', '--netlist', '2smc_n')[0] == EXIT_USAGE

    def it_returns_usage_for_missing_files(self):
        assert run('run', '--netlist', 'missing.sp', '--targets', 't180',
                   '--process', 't180_toy')[0] == EXIT_USAGE

    def it_returns_usage_without_a_process_card(self):
        assert run('run', '--netlist', '2smc_n', '--targets', 't180')[0] == \
            EXIT_USAGE

    def it_rejects_a_zero_repeat(self):
        assert run('run', '--netlist', '2smc_n', '--targets', 't180',
                   '--process', 't180_toy', '--repeat', '0')[0] == EXIT_USAGE

    def it_returns_runtime_for_a_missing_run_directory(self, tmpdir):
        code, _ = run('report', str(tmpdir.join('nothing')))
        assert code == EXIT_RUNTIME


class DescribeSimulate:
    def it_writes_the_operating_point_and_metrics(self, simulated):
        output, text = simulated
        assert sorted(os.listdir(output)) == ['metrics.json', 'op.json']
        assert text.splitlines()[0].startswith('Gain: ')
        assert 'GBW: ' in text

    def it_uses_the_default_process_card(self, tmpdir):
        from ampsizer.library import config_path
        ampsizer.init(config_path('t180_toy'))
        try:
            code, _ = run('simulate', '--netlist', '2smc_n', '-o',
                          str(tmpdir))
        finally:
            ampsizer.set_default_process_card(None)
        assert code == EXIT_OK


class DescribeCalibrate:
    def it_prints_the_table_in_netlist_order(self, simulated):
        output, _ = simulated
        code, text = run('calibrate', os.path.join(output, 'op.json'),
                         '--netlist', '2smc_n')
        assert code == EXIT_OK
        lines = text.splitlines()
        assert lines[0].startswith('Dev')
        assert [line.split()[0] for line in lines[1:9]] == [
            'M6', 'M5', 'M1', 'M2', 'M3', 'M4', 'M8', 'M7']

    def it_prints_json(self, simulated):
        output, _ = simulated
        code, text = run('calibrate', os.path.join(output, 'op.json'),
                         '--json')
        assert code == EXIT_OK
        assert len(json.loads(text)['rows']) == 8

    def it_rejects_unreadable_files(self, tmpdir):
        path = tmpdir.join('op.json')
        path.write('not json')
        assert run('calibrate', str(path))[0] == EXIT_USAGE


class DescribePlanExec:
    def it_prints_bindings_sizes_and_predictions(self):
        code, text = run('plan-exec', '--plan', '2smc', '--netlist',
                         '2smc_n', '--targets', 't180', '--process',
                         't180_toy')
        assert code == EXIT_OK
        lines = text.splitlines()
        assert 'gm1 = 314.16u' in lines
        assert 'Cc = 500f' in lines
        assert any(line.startswith('M1: W = ') for line in lines)
        assert any(line.startswith('predicted GBW: ') for line in lines)
