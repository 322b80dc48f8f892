"""Classical two-node exponential quadrature rule (polynomial interpolation of g in t)."""

from eqrf.exceptions import NodeSetError
from eqrf.integrators.base import FractionalSource, Stepper
from eqrf.operators import DiagonalizableOperator, State, modal_phi
from eqrf.quadrule import NodeSet
from eqrf.types import ComplexArray


class CEQR2Stepper(Stepper):
    """
    y_{n+1} = e^(tau A) y_n + W_1 g(t_n + c_1 tau) + W_2 g(t_n + c_2 tau) with

        W_1 = tau (c_2/(c_2 - c_1) phi_1 - 1/(c_2 - c_1) phi_2)(tau A)
        W_2 = tau (-c_1/(c_2 - c_1) phi_1 + 1/(c_2 - c_1) phi_2)(tau A)
    """

    label = "CEQR2"

    def __init__(
        self,
        op: DiagonalizableOperator,
        source: FractionalSource,
        tau: float,
        nodes: NodeSet,
        debug: bool = False,
    ):
        if nodes.nu != 2:
            raise NodeSetError(f"CEQR2 needs exactly 2 collocation nodes, got {nodes.nu}")
        super().__init__(op, source, tau, debug=debug)
        self.nodes = nodes
        c1, c2 = nodes.c
        gap = c2 - c1
        phi2 = self.tau * modal_phi(op, 2, self.tau)
        self.first = (c2 * self.phi1 - phi2) / gap
        self.second = (phi2 - c1 * self.phi1) / gap

    def advance(self, y_modal: ComplexArray, t_n: float) -> ComplexArray:
        c1, c2 = self.nodes.c
        g1 = self.source.scalar(t_n + c1 * self.tau)
        g2 = self.source.scalar(t_n + c2 * self.tau)
        return self.expm * y_modal + (g1 * self.first + g2 * self.second) * self.profile_modal


def ceqr2_step(state: State, op: DiagonalizableOperator, source: FractionalSource, nodes: NodeSet, tau: float) -> State:
    return CEQR2Stepper(op, source, tau, nodes=nodes).step(state)
