"""Shipped netlists, process cards, target sets and reference plans."""
import os

from ampsizer.exceptions import NoReferencePlanError

__all__ = [
    'library_directory',
    'netlist_path',
    'config_path',
    'plan_path',
    'available_plans',
    'reference_plan_path',
]


def library_directory():
    """Return the directory of the library."""
    return os.path.dirname(__file__)


def netlist_path(name):
    """Path of a shipped netlist, '2smc_n' or '2smc_n.sp'."""
    if not name.endswith('.sp'):
        name += '.sp'
    return os.path.join(library_directory(), 'netlists', name)


def config_path(name):
    """Path of a shipped .cfg file (process card, targets, campaign)."""
    if not name.endswith('.cfg'):
        name += '.cfg'
    return os.path.join(library_directory(), name)


def available_plans():
    """Topology families with a reference plan, upper case."""
    directory = os.path.join(library_directory(), 'plans')
    return sorted(f.rpartition('.')[0].upper() for f in os.listdir(directory)
                  if f.endswith('.plan'))


def reference_plan_path(topology):
    """Path of the reference plan of a topology family."""
    if topology.upper() not in available_plans():
        raise NoReferencePlanError(topology)
    return os.path.join(library_directory(), 'plans',
                        topology.lower() + '.plan')


def plan_path(name):
    """Path of a shipped plan file, '2smc' or '2smc.plan'."""
    if not name.endswith('.plan'):
        name += '.plan'
    return os.path.join(library_directory(), 'plans', name)
