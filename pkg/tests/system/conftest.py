import pytest

import ampsizer
from ampsizer.library import config_path, netlist_path
from ampsizer.orchestrator import CampaignConfig


@pytest.fixture(autouse=True)
def default_process_card():
    yield
    ampsizer.set_default_process_card(None)


@pytest.fixture
def make_config():
    def make(netlist='2smc_n', targets='t180', run_dir=None, **overrides):
        cfg = CampaignConfig.from_files(
            netlist_path(netlist), config_path(targets),
            process=config_path('t180_toy'))
        cfg.run_dir = run_dir
        for key, value in overrides.items():
            setattr(cfg, key, value)
        return cfg
    return make
