from ampsizer.device import ProcessCard
from ampsizer import (
    config,
    exceptions,
    utils,
)

__all__ = [
    # package modules
    'config',
    'exceptions',
    'utils',
    # default process card
    'get_default_process_card',
    'set_default_process_card',
    # init function
    'init',
]

__version__ = '0.1.0'

_DEFAULT_PROCESS_CARD = None


def get_default_process_card():
    """Return the card installed by init()."""
    if _DEFAULT_PROCESS_CARD is None:
        raise exceptions.ConfigError(
            "No process card given and no default installed; call "
            "ampsizer.init(process=...) or pass one explicitly.")
    return _DEFAULT_PROCESS_CARD


def set_default_process_card(card):
    global _DEFAULT_PROCESS_CARD
    _DEFAULT_PROCESS_CARD = card


def init(process=None):
    """Install a default ProcessCard.

        process: ProcessCard, or path of a process card .cfg file

    """
    if isinstance(process, str):
        process = ProcessCard.load(process)
    set_default_process_card(process)
    return process
