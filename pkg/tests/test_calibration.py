import json
import math

import numpy as np
import pytest

from ampsizer.calibration import (
    ESTIMATE,
    CalibrationTable,
    estimate_record,
    extract_device,
    extract_table,
    flag_regions,
    format_table,
)
from ampsizer.device import CUTOFF, SAT, TRIODE, ProcessCard
from ampsizer.exceptions import AmpsizerError
from ampsizer.library import config_path, netlist_path
from ampsizer.netlist import (
    DesignVariables,
    apply_design_variables,
    load_netlist,
)
from ampsizer.simulator import DeviceOP, OperatingPoint
from ampsizer.simulator.dc import dc_operating_point
from ampsizer.utils import dumps


def device_op(**kwargs):
    values = dict(model='NMOS', w=0.7e-6, l=0.2e-6, vgs=0.5, vds=0.3,
                  vsb=0.0, id=6.97e-6, gm=101.37e-6, gds=1.0 / 225.2e3,
                  gmb=0.0, vth=0.451, vov=0.049, region=SAT)
    values.update(kwargs)
    return DeviceOP(**values)


@pytest.fixture
def input_device():
    return device_op()


@pytest.fixture
def tail_in_triode():
    return device_op(w=4e-6, l=0.5e-6, vds=0.056, vov=0.083, id=40e-6,
                     gm=500e-6, gds=200e-6, region=TRIODE)


class DescribeExtractDevice:
    def it_extracts_the_four_parameters(self, input_device):
        record = extract_device(input_device, 0.7e-6, 0.2e-6, 'M1')
        assert record.region == SAT
        assert record.agm == pytest.approx(0.356, abs=1e-3)
        assert record.lam == pytest.approx(0.637, abs=1e-3)
        assert record.mu_cox == pytest.approx(1613.7e-6, rel=3e-2)
        assert record.ro == pytest.approx(225.2e3)
        assert record.vth == 0.451

    def it_reports_magnitudes_for_pmos(self):
        dop = device_op(model='PMOS', id=-6.97e-6, vds=-0.3)
        record = extract_device(dop, 0.7e-6, 0.2e-6, 'M3')
        assert record.id == pytest.approx(6.97e-6)
        assert record.vds == pytest.approx(0.3)
        assert record.polarity == -1.0
        assert record.agm == pytest.approx(0.356, abs=1e-3)

    def it_classifies_triode_from_vds_and_vov(self, tail_in_triode):
        record = extract_device(tail_in_triode, 4e-6, 0.5e-6, 'M5')
        assert record.region == TRIODE
        assert record.mu_cox is not None

    def it_leaves_parameters_empty_in_cutoff(self):
        dop = device_op(id=0.0, vov=-0.1, gm=0.0, gds=0.0, region=CUTOFF)
        record = extract_device(dop, 1e-6, 1e-6, 'M9')
        assert record.region == CUTOFF
        assert not record.conducting
        assert record.mu_cox is None
        assert record.agm is None
        assert record.lam is None

    def it_reports_infinite_output_resistance_without_gds(self):
        record = extract_device(device_op(gds=0.0), 0.7e-6, 0.2e-6, 'M1')
        assert record.lam == 0.0
        assert math.isinf(record.ro)


class DescribeFlagRegions:
    def it_warns_about_triode_devices(self, input_device, tail_in_triode):
        table = CalibrationTable([
            extract_device(input_device, 0.7e-6, 0.2e-6, 'M1'),
            extract_device(tail_in_triode, 4e-6, 0.5e-6, 'M5'),
        ])
        assert flag_regions(table) == [
            'M5 in TRIODE (|Vds|=56mV < Vov=83mV)']

    def it_warns_about_devices_in_cutoff(self):
        dop = device_op(id=0.0, vov=-0.1, gm=0.0, gds=0.0, region=CUTOFF)
        table = CalibrationTable([extract_device(dop, 1e-6, 1e-6, 'M9')])
        assert flag_regions(table) == [
            'M9 in CUTOFF (Ids=0.00uA, Vov=-100mV)']


class DescribeFormatTable:
    def it_renders_rows_and_warnings(self, input_device, tail_in_triode):
        table = CalibrationTable([
            extract_device(input_device, 0.7e-6, 0.2e-6, 'M1'),
            extract_device(tail_in_triode, 4e-6, 0.5e-6, 'M5'),
        ])
        table.warnings = flag_regions(table)
        text = format_table(table)
        lines = text.splitlines()
        assert lines[0].startswith('Dev')
        assert 'μCox(μA/V2)' in lines[0]
        assert lines[1].split()[:3] == ['M1', 'NMOS', '0.7/0.20']
        assert '1658.8' in lines[1]
        assert '0.356' in lines[1]
        assert '0.6371' in lines[1]
        assert lines[-1] == 'WARNING: M5 in TRIODE (|Vds|=56mV < Vov=83mV)'

    def it_renders_missing_parameters_as_dashes(self):
        dop = device_op(id=0.0, vov=-0.1, gm=0.0, gds=0.0, region=CUTOFF)
        text = format_table(CalibrationTable(
            [extract_device(dop, 1e-6, 1e-6, 'M9')]))
        assert text.splitlines()[1].split()[-5:] == ['-'] * 5


class DescribeCalibrationTable:
    def it_round_trips_through_json(self, input_device):
        table = CalibrationTable(
            [extract_device(device_op(gds=0.0), 0.7e-6, 0.2e-6, 'M1')],
            ['note'])
        doc = json.loads(dumps(table))
        assert 'lambda' in doc['rows'][0]
        assert CalibrationTable.from_json(doc) == table

    def it_looks_up_rows_by_device(self, input_device):
        record = extract_device(input_device, 0.7e-6, 0.2e-6, 'M1')
        table = CalibrationTable([record])
        assert table.get('M1') is record
        assert table.as_map() == {'M1': record}
        with pytest.raises(KeyError):
            table.get('M2')


class DescribeExtractTable:
    @pytest.fixture
    def card(self):
        return ProcessCard.load(config_path('t180_toy'))

    @pytest.fixture
    def net(self):
        return load_netlist(netlist_path('2smc_n'))

    def it_follows_netlist_order(self, net, card):
        table = extract_table(dc_operating_point(net, card), net)
        assert [r.device for r in table] == [m.name for m in net.mosfets]

    @pytest.mark.parametrize('seed', range(5))
    @pytest.mark.parametrize('name', ('2smc_n', '2smc_p', 'cm_n'))
    def it_reproduces_the_solved_bias(self, name, seed, card):
        rng = np.random.default_rng(seed)
        net = load_netlist(netlist_path(name))
        net = apply_design_variables(net, DesignVariables(widths=dict(
            (m.name, m.w * rng.uniform(0.8, 1.25)) for m in net.mosfets)))
        op = dc_operating_point(net, card)
        checked = 0
        for record in extract_table(op, net):
            dop = op.device_ops[record.device]
            if record.region != SAT or dop.reverse:
                continue
            square_law = 0.5 * record.mu_cox * record.w / record.l * \
                record.vov ** 2
            assert square_law == pytest.approx(record.id, rel=1e-12)
            assert record.agm * 2.0 * record.id / record.vov == \
                pytest.approx(record.gm, rel=1e-12)
            assert record.lam * record.id == pytest.approx(record.gds,
                                                           rel=1e-12)
            params = card.params(record.type)
            expected = params.mu0cox * (
                1.0 + params.lambdal / record.l * record.vds) / (
                1.0 + params.theta * record.vov)
            assert record.mu_cox == pytest.approx(expected, rel=1e-9)
            checked += 1
        assert checked >= 3

    def it_raises_for_devices_missing_from_the_operating_point(self, net):
        with pytest.raises(AmpsizerError):
            extract_table(OperatingPoint({}, {}, {}), net)


class DescribeEstimateRecord:
    def it_holds_parameters_only(self):
        net = load_netlist(netlist_path('2smc_n'))
        record = estimate_record(net.get('M1'), 300e-6, 0.7, 0.05, 0.45)
        assert record.region == ESTIMATE
        assert record.id == 0.0
        assert (record.mu_cox, record.agm, record.lam, record.vth) == \
            (300e-6, 0.7, 0.05, 0.45)
        assert record.w == net.get('M1').w
