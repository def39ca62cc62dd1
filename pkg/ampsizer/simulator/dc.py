"""DC operating point by damped Newton iteration with gmin stepping."""
import logging

import numpy as np

from ampsizer.exceptions import (
    ConvergenceError,
    SimulationError,
    SingularMatrixError,
)
from ampsizer.netlist import CURRENT_SOURCE, VOLTAGE_SOURCE
from ampsizer.simulator.mna import MnaSystem

__all__ = [
    'VOLTAGE_TOL',
    'CURRENT_TOL',
    'newton',
    'dc_operating_point',
    'power',
]

log = logging.getLogger(__name__)

VOLTAGE_TOL = 1e-9
CURRENT_TOL = 1e-9
MAX_STEP = 0.5
MAX_HALVINGS = 20
MAX_ITERATIONS = 200
# Added to the Jacobian diagonal only; the residual is left exact.
JACOBIAN_REG = 1e-12
GMIN_STEPS = tuple(10.0 ** -k for k in range(3, 13))


def _max_residual(F, node_count):
    nodes = np.max(np.abs(F[:node_count])) if node_count else 0.0
    return float(nodes)


def _converged(F, dx, node_count):
    branches = F[node_count:]
    return (np.max(np.abs(dx)) < VOLTAGE_TOL and
            _max_residual(F, node_count) < CURRENT_TOL and
            (not len(branches) or np.max(np.abs(branches)) < VOLTAGE_TOL))


def newton(fun, x, node_count, max_iterations=MAX_ITERATIONS):
    """Damped Newton iteration on fun(x) -> (F, J).

    Steps are limited to MAX_STEP volts and halved until the residual norm
    decreases.  Returns (x, F, iterations).  Raises ConvergenceError, or
    numpy.linalg.LinAlgError when the Jacobian is singular.

    """
    F, J = fun(x)
    reg = np.zeros(len(x))
    reg[:node_count] = JACOBIAN_REG
    for iteration in range(max_iterations):
        dx = np.linalg.solve(J + np.diag(reg), -F)
        if _converged(F, dx, node_count):
            return x, F, iteration
        largest = np.max(np.abs(dx))
        if largest > MAX_STEP:
            dx *= MAX_STEP / largest
        norm = np.linalg.norm(F)
        alpha = 1.0
        for _ in range(MAX_HALVINGS + 1):
            x_new = x + alpha * dx
            F_new, J_new = fun(x_new)
            if np.linalg.norm(F_new) < norm:
                break
            alpha *= 0.5
        x, F, J = x_new, F_new, J_new
    raise ConvergenceError(residual=_max_residual(F, node_count))


def _solve(system, x, gmin):
    def fun(state):
        F, J, _ = system.residual(state, gmin)
        return F, J
    x, F, iterations = newton(fun, x, system.node_count)
    log.debug("Newton converged in %d iterations (gmin=%g)", iterations, gmin)
    return x


def dc_operating_point(net, card, guess=None):
    """Solve the DC operating point of net.

        net: Netlist
        card: ProcessCard
        guess: optional OperatingPoint to start from instead of 0 V

    """
    if not any(i.kind in (VOLTAGE_SOURCE, CURRENT_SOURCE)
               for i in net.instances):
        raise SimulationError("The netlist has no independent source.")
    system = MnaSystem(net, card)
    system.check_connectivity()
    start = np.zeros(system.size) if guess is None \
        else system.state_vector(guess)
    try:
        try:
            x = _solve(system, start, 0.0)
        except ConvergenceError as exc:
            log.info("%s: plain Newton failed (%s), stepping gmin",
                     net.name, exc)
            x = start
            for gmin in GMIN_STEPS:
                x = _solve(system, x, gmin)
            x = _solve(system, x, 0.0)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(
            "The circuit matrix of {0} is singular.".format(net.name))
    F, _, evals = system.residual(x)
    residual = _max_residual(F, system.node_count)
    if residual >= CURRENT_TOL:
        raise ConvergenceError(residual=residual)
    return system.operating_point(x, evals, residual)


def power(op, supplies):
    """Power drawn from the rails: sum of |V * I| over the supply sources."""
    return float(sum(abs(volts * op.supply_currents.get(name, 0.0))
                     for name, volts in supplies.items()))
