"""Modified nodal analysis system assembly.

Unknowns are the voltages of the non-ground nodes followed by one branch
current per voltage source.  A branch current flows from the source's
positive terminal through the source to its negative terminal, so the
current a source delivers to the circuit is the negative of its unknown.
Residual rows of nodes are the sum of currents leaving the node; branch
rows are ``v(n+) - v(n-) - V``.

"""
from collections import defaultdict, deque

import numpy as np

from ampsizer.device import eval_mosfet
from ampsizer.exceptions import SingularMatrixError
from ampsizer.netlist import (
    CAPACITOR,
    CURRENT_SOURCE,
    GROUND,
    MOSFET,
    RESISTOR,
    VOLTAGE_SOURCE,
)
from ampsizer.simulator import DeviceOP, OperatingPoint

__all__ = ['MnaSystem']


class MnaSystem(object):
    """MNA view of a netlist.

        net: Netlist to simulate
        card: ProcessCard for nonlinear evaluation, not needed for the
            linearized matrices

    """

    def __init__(self, net, card=None):
        self.net = net
        self.card = card
        self.nodes = net.nodes[1:]
        self._index = dict((node, i) for i, node in enumerate(self.nodes))
        self.vsources = [i for i in net.instances
                         if i.kind == VOLTAGE_SOURCE]
        self._branch = dict(
            (src.name, len(self.nodes) + k)
            for k, src in enumerate(self.vsources))
        self.size = len(self.nodes) + len(self.vsources)

    @property
    def node_count(self):
        return len(self.nodes)

    def index(self, node):
        """Row of a node, None for ground."""
        if node == GROUND:
            return None
        return self._index[node]

    def branch(self, name):
        return self._branch[name.upper()]

    def check_connectivity(self):
        """Raise SingularMatrixError for a node without a DC path to ground."""
        graph = defaultdict(set)
        for inst in self.net.instances:
            if inst.kind in (RESISTOR, VOLTAGE_SOURCE):
                a, b = inst.terminals
            elif inst.kind == MOSFET:
                a, b = inst.drain, inst.source
            else:
                continue
            graph[a].add(b)
            graph[b].add(a)
        seen = set([GROUND])
        queue = deque([GROUND])
        while queue:
            node = queue.popleft()
            for other in graph[node] - seen:
                seen.add(other)
                queue.append(other)
        for node in self.nodes:
            if node not in seen:
                raise SingularMatrixError(node=node)

    def state_vector(self, op):
        x = np.zeros(self.size)
        for node, i in self._index.items():
            x[i] = op.node_voltages.get(node, 0.0)
        for name, k in self._branch.items():
            x[k] = -op.supply_currents.get(name, 0.0)
        return x

    def _voltage(self, x, node):
        i = self.index(node)
        return 0.0 if i is None else x[i]

    def terminal_voltages(self, x, inst):
        """(Vgs, Vds, Vsb) of a MOSFET."""
        vd, vg, vs, vb = (self._voltage(x, n) for n in inst.terminals)
        return vg - vs, vd - vs, vs - vb

    def evaluate(self, x):
        """DeviceEval of every MOSFET at the state x."""
        evals = {}
        for inst in self.net.mosfets:
            vgs, vds, vsb = self.terminal_voltages(x, inst)
            evals[inst.name] = eval_mosfet(
                self.card, inst.model, inst.w, inst.l, vgs, vds, vsb)
        return evals

    def _stamp(self, matrix, row, col, value):
        if row is not None and col is not None:
            matrix[row, col] += value

    def _stamp_admittance(self, matrix, a, b, value):
        ia, ib = self.index(a), self.index(b)
        self._stamp(matrix, ia, ia, value)
        self._stamp(matrix, ib, ib, value)
        self._stamp(matrix, ia, ib, -value)
        self._stamp(matrix, ib, ia, -value)

    def _stamp_linear(self, J):
        for inst in self.net.instances:
            if inst.kind == RESISTOR:
                self._stamp_admittance(J, *inst.terminals, 1.0 / inst.value)
            elif inst.kind == VOLTAGE_SOURCE:
                k = self._branch[inst.name]
                a, b = (self.index(n) for n in inst.terminals)
                self._stamp(J, a, k, 1.0)
                self._stamp(J, b, k, -1.0)
                self._stamp(J, k, a, 1.0)
                self._stamp(J, k, b, -1.0)

    def _stamp_mosfet(self, J, inst, partials):
        pg, pd, psb = partials
        d, g, s, b = (self.index(n) for n in inst.terminals)
        columns = ((d, pd), (g, pg), (s, -(pg + pd) + psb), (b, -psb))
        for col, value in columns:
            self._stamp(J, d, col, value)
            self._stamp(J, s, col, -value)

    def residual(self, x, gmin=0.0):
        """Return (F, J, evals) at the state x."""
        F = np.zeros(self.size)
        J = np.zeros((self.size, self.size))
        self._stamp_linear(J)
        evals = self.evaluate(x)
        for inst in self.net.instances:
            if inst.kind == RESISTOR:
                a, b = (self.index(n) for n in inst.terminals)
                current = (self._voltage(x, inst.terminals[0]) -
                           self._voltage(x, inst.terminals[1])) / inst.value
                if a is not None:
                    F[a] += current
                if b is not None:
                    F[b] -= current
            elif inst.kind == CURRENT_SOURCE:
                a, b = (self.index(n) for n in inst.terminals)
                if a is not None:
                    F[a] += inst.value
                if b is not None:
                    F[b] -= inst.value
            elif inst.kind == VOLTAGE_SOURCE:
                k = self._branch[inst.name]
                a, b = (self.index(n) for n in inst.terminals)
                if a is not None:
                    F[a] += x[k]
                if b is not None:
                    F[b] -= x[k]
                F[k] = (self._voltage(x, inst.terminals[0]) -
                        self._voltage(x, inst.terminals[1]) - inst.value)
            elif inst.kind == MOSFET:
                ev = evals[inst.name]
                d, s = self.index(inst.drain), self.index(inst.source)
                if d is not None:
                    F[d] += ev.id
                if s is not None:
                    F[s] -= ev.id
                self._stamp_mosfet(J, inst, ev.partials())
        if gmin:
            n = self.node_count
            F[:n] += gmin * x[:n]
            J[np.arange(n), np.arange(n)] += gmin
        return F, J, evals

    def conductance(self, op):
        """Small-signal conductance matrix at a solved operating point."""
        G = np.zeros((self.size, self.size))
        self._stamp_linear(G)
        for inst in self.net.mosfets:
            self._stamp_mosfet(G, inst, op.device_ops[inst.name].partials())
        return G

    def capacitance(self, op, gate_nodes=None):
        """Capacitance matrix: capacitors plus frozen MOSFET charges.

            op: operating point supplying the device capacitances
            gate_nodes: device name -> node to attach the gate
                capacitances to instead of the device's own gate

        """
        gate_nodes = gate_nodes or {}
        C = np.zeros((self.size, self.size))
        for inst in self.net.instances:
            if inst.kind == CAPACITOR:
                self._stamp_admittance(C, *inst.terminals, inst.value)
            elif inst.kind == MOSFET:
                dop = op.device_ops[inst.name]
                gate = gate_nodes.get(inst.name, inst.gate)
                self._stamp_admittance(C, gate, inst.source, dop.cgs)
                self._stamp_admittance(C, gate, inst.drain, dop.cgd)
                self._stamp_admittance(C, inst.drain, inst.bulk, dop.cdb)
                self._stamp_admittance(C, inst.source, inst.bulk, dop.csb)
        return C

    def excitation(self, name):
        """Right-hand side for a unit AC value of the named source."""
        inst = self.net.get(name)
        b = np.zeros(self.size)
        if inst.kind == VOLTAGE_SOURCE:
            b[self._branch[inst.name]] = 1.0
        elif inst.kind == CURRENT_SOURCE:
            pos, neg = (self.index(n) for n in inst.terminals)
            if pos is not None:
                b[pos] = -1.0
            if neg is not None:
                b[neg] = 1.0
        else:
            raise ValueError("{0} is not a source".format(inst.name))
        return b

    def operating_point(self, x, evals, residual=0.0):
        voltages = {GROUND: 0.0}
        for node, i in self._index.items():
            voltages[node] = float(x[i])
        device_ops = {}
        for inst in self.net.mosfets:
            ev = evals[inst.name]
            vgs, vds, vsb = self.terminal_voltages(x, inst)
            device_ops[inst.name] = DeviceOP(
                model=inst.model, w=inst.w, l=inst.l,
                vgs=float(vgs), vds=float(vds), vsb=float(vsb),
                id=ev.id, gm=ev.gm, gds=ev.gds, gmb=ev.gmb, vth=ev.vth,
                vov=ev.vov, region=ev.region, cgs=ev.cgs, cgd=ev.cgd,
                cdb=ev.cdb, csb=ev.csb, reverse=ev.reverse)
        supply_currents = dict(
            (name, -float(x[k])) for name, k in self._branch.items())
        return OperatingPoint(voltages, device_ops, supply_currents,
                              float(residual))
