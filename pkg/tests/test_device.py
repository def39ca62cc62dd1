import numpy as np
import pytest

from ampsizer.config import parse_config
from ampsizer.device import (
    CUTOFF,
    NMOS,
    PMOS,
    SAT,
    TRIODE,
    DeviceParams,
    ProcessCard,
    eval_mosfet,
)
from ampsizer.exceptions import ConfigError
from ampsizer.library import config_path

STEP = 1e-6


@pytest.fixture
def ideal():
    params = DeviceParams(mu0cox=200e-6, vth0=0.4, lambdal=0.02e-6)
    return ProcessCard('ideal', params, params)


@pytest.fixture
def toy():
    return ProcessCard.load(config_path('t180_toy'))


def finite_differences(card, model, w, l, vgs, vds, vsb):
    def current(*v):
        return eval_mosfet(card, model, w, l, *v).id
    point = [vgs, vds, vsb]
    result = []
    for k in range(3):
        up, down = list(point), list(point)
        up[k] += STEP
        down[k] -= STEP
        result.append((current(*up) - current(*down)) / (2.0 * STEP))
    return result


class DescribeSquareLaw:
    def it_matches_the_closed_form_in_saturation(self, ideal):
        ev = eval_mosfet(ideal, NMOS, 10e-6, 1e-6, 0.6, 1.0, 0.0)
        assert ev.region == SAT
        assert ev.vth == pytest.approx(0.4)
        assert ev.vov == pytest.approx(0.2)
        assert ev.id == pytest.approx(4.08e-5, rel=1e-12)
        assert ev.gm == pytest.approx(4.08e-4, rel=1e-12)
        assert ev.gds == pytest.approx(8e-7, rel=1e-12)

    def it_negates_pmos_current(self, ideal):
        ev = eval_mosfet(ideal, PMOS, 10e-6, 1e-6, -0.6, -1.0, 0.0)
        assert ev.region == SAT
        assert ev.id == pytest.approx(-4.08e-5, rel=1e-12)
        assert ev.gm > 0.0

    def it_conducts_nothing_below_threshold(self, ideal):
        ev = eval_mosfet(ideal, NMOS, 10e-6, 1e-6, 0.3, 1.0, 0.0)
        assert ev.region == CUTOFF
        assert ev.id == 0.0
        assert ev.gm == 0.0

    def it_enters_triode_below_the_overdrive(self, ideal):
        ev = eval_mosfet(ideal, NMOS, 10e-6, 1e-6, 0.6, 0.1, 0.0)
        assert ev.region == TRIODE

    def it_raises_threshold_with_source_bulk_bias(self, toy):
        low = eval_mosfet(toy, NMOS, 5e-6, 0.5e-6, 0.8, 0.6, 0.0)
        high = eval_mosfet(toy, NMOS, 5e-6, 0.5e-6, 0.8, 0.6, 0.2)
        assert high.vth > low.vth
        assert low.vth == pytest.approx(0.45)

    def it_swaps_terminals_in_reverse_operation(self, toy):
        ev = eval_mosfet(toy, NMOS, 5e-6, 0.5e-6, 0.8, -0.2, 0.2)
        assert ev.reverse
        assert ev.id < 0.0


class DescribeDerivatives:
    @pytest.mark.parametrize('model,bias', [
        (NMOS, (0.8, 0.6, 0.2)),
        (NMOS, (0.8, 0.1, 0.2)),
        (NMOS, (0.8, -0.2, 0.2)),
        (PMOS, (-0.8, -0.6, -0.2)),
        (PMOS, (-0.8, -0.1, -0.2)),
    ])
    def it_matches_finite_differences(self, toy, model, bias):
        ev = eval_mosfet(toy, model, 5e-6, 0.5e-6, *bias)
        numeric = finite_differences(toy, model, 5e-6, 0.5e-6, *bias)
        for analytic, fd in zip(ev.partials(), numeric):
            assert analytic == pytest.approx(fd, rel=1e-4, abs=1e-12)

    @pytest.mark.parametrize('model,sign', [(NMOS, 1.0), (PMOS, -1.0)])
    def it_matches_finite_differences_across_saturation(self, toy, model,
                                                         sign):
        rng = np.random.default_rng(7)
        for _ in range(100):
            w = rng.uniform(1e-6, 50e-6)
            l = rng.uniform(0.18e-6, 1e-6)
            vsb = rng.uniform(0.0, 0.3)
            vgs = rng.uniform(0.6, 1.2)
            vds = rng.uniform(vgs - 0.3, 1.5)
            bias = (sign * vgs, sign * vds, sign * vsb)
            ev = eval_mosfet(toy, model, w, l, *bias)
            assert ev.region == SAT
            numeric = finite_differences(toy, model, w, l, *bias)
            for analytic, fd in zip(ev.partials(), numeric):
                assert analytic == pytest.approx(fd, rel=1e-4, abs=1e-12)


class DescribeCapacitances:
    def it_uses_two_thirds_of_the_gate_in_saturation(self, toy):
        ev = eval_mosfet(toy, NMOS, 5e-6, 0.5e-6, 0.8, 0.6, 0.0)
        gate = 5e-6 * 0.5e-6 * 8.5e-3
        overlap = 5e-6 * 0.3e-9
        assert ev.cgs == pytest.approx(2.0 / 3.0 * gate + overlap)
        assert ev.cgd == pytest.approx(overlap)
        assert ev.cdb == pytest.approx(1e-3 * 5e-6 * 0.5e-6)


class DescribeProcessCard:
    def it_loads_shipped_cards(self, toy):
        assert toy.name == 't180_toy'
        assert toy.nmos.mu0cox == pytest.approx(300e-6)
        assert toy.pmos.mu0cox == pytest.approx(80e-6)

    def it_loads_the_40nm_card(self):
        card = ProcessCard.load(config_path('t40_toy'))
        assert card.name == 't40_toy'
        assert card.nmos.vth0 == card.pmos.vth0 == pytest.approx(0.3)
        assert card.nmos.mu0cox == pytest.approx(450e-6)
        ev = eval_mosfet(card, NMOS, 2e-6, 0.04e-6, 0.5, 0.3, 0.0)
        assert ev.region == SAT
        assert ev.vov == pytest.approx(0.2)

    def it_round_trips_through_json(self, toy):
        assert ProcessCard.from_json(toy.__json__()) == toy

    def it_requires_mu0cox_and_vth0(self):
        with pytest.raises(ConfigError):
            ProcessCard.from_config(parse_config(
                "nmos.vth0 = .4\npmos.mu0cox = 80u\npmos.vth0 = .4"))

    def it_rejects_negative_parameters(self):
        with pytest.raises(ConfigError):
            DeviceParams(mu0cox=1e-4, vth0=0.4, gamma=-0.1)
        with pytest.raises(ConfigError):
            DeviceParams(mu0cox=0.0, vth0=0.4)

    def it_rejects_unknown_device_types(self, toy):
        with pytest.raises(ConfigError):
            toy.params('BJT')
