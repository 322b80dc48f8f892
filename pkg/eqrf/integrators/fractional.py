"""
Exponential quadrature rules for fractional sources (EQRF-nu).

The source h(t^r) v is interpolated on [t_n, t_n + tau] in the basis
{(t_n + s)^(j r)}, j = 0..nu-1, at the collocation nodes, and the resulting
interpolant is integrated exactly against the propagator:

    y_{n+1} = e^(tau A) y_n + tau phi_1(tau A) alpha_0 + sum_{j>=1} W_j(t_n) alpha_j
"""

import logging
from typing import Optional

import numpy as np

from eqrf.exceptions import FormulationMismatchError, NodeSetError
from eqrf.integrators.base import FractionalSource, Stepper
from eqrf.integrators.weights import (
    DEFAULT_QUADRATURE_NODES,
    ORACLE_MAX_PHASE,
    FractionalPhiWeights,
    QuadratureWeights,
    WeightCalculator,
    interpolation_scalars,
    kernel_weight_array,
    kernel_weight_oracle,
)
from eqrf.operators import DiagonalizableOperator, State
from eqrf.quadrule import NodeSet, node_set
from eqrf.types import ComplexArray, Formulation

logger = logging.getLogger(__name__)

CROSS_CHECK_TOLERANCE = 1e-9
ORACLE_SAMPLE_RATE = 0.01


class EQRFStepper(Stepper):
    """
    EQRF-nu on a fixed step size.

    With `debug=True` every step also evaluates the other weight
    formulation and compares the source contributions, and a random 1% of
    steps compare a few kernel weights against direct quadrature.
    """

    def __init__(
        self,
        op: DiagonalizableOperator,
        source: FractionalSource,
        tau: float,
        nodes: NodeSet,
        formulation: Formulation = "fractional_phi",
        n_quad: int = DEFAULT_QUADRATURE_NODES,
        graded: bool = True,
        debug: bool = False,
        cross_check_tolerance: float = CROSS_CHECK_TOLERANCE,
    ):
        super().__init__(op, source, tau, debug=debug)
        self.nodes = nodes
        self.label = f"EQRF{nodes.nu}"
        self.formulation = formulation
        self.weights = self._calculator(formulation, n_quad, graded)
        self.shadow: Optional[WeightCalculator] = None
        self.cross_check_tolerance = cross_check_tolerance
        self._rng = np.random.default_rng(0)
        if debug and nodes.nu > 1:
            other: Formulation = "integral_quadrature" if formulation == "fractional_phi" else "fractional_phi"
            self.shadow = self._calculator(other, n_quad, graded)

    def _calculator(self, formulation: Formulation, n_quad: int, graded: bool) -> WeightCalculator:
        args = (self.op.eigenvalues, self.tau, self.source.r, self.nodes.nu, self.phi1)
        if formulation == "fractional_phi":
            return FractionalPhiWeights(*args)
        if formulation == "integral_quadrature":
            return QuadratureWeights(*args, n_quad=n_quad, graded=graded)
        raise ValueError(f"unknown formulation {formulation!r}")

    def advance(self, y_modal: ComplexArray, t_n: float) -> ComplexArray:
        coefficients = interpolation_scalars(self.nodes, self.source.h, self.source.r, t_n, self.tau)
        weight = self.weights.combine(coefficients, t_n)
        if self.debug:
            self._cross_check(coefficients, weight, t_n)
        return self.expm * y_modal + weight * self.profile_modal

    def _cross_check(self, coefficients: np.ndarray, weight: ComplexArray, t_n: float) -> None:
        if self.shadow is not None:
            other = self.shadow.combine(coefficients, t_n)
            contribution = self.op.from_modal((weight - other) * self.profile_modal)
            scale = max(float(np.max(np.abs(self.op.from_modal(weight * self.profile_modal)))), 1.0)
            discrepancy = float(np.max(np.abs(contribution))) / scale
            logger.debug("t_n=%g formulation discrepancy %.3e", t_n, discrepancy)
            if discrepancy > self.cross_check_tolerance:
                raise FormulationMismatchError(discrepancy, self.cross_check_tolerance, f"step at t_n={t_n:g}")

        if self.nodes.nu > 1 and self._rng.random() < ORACLE_SAMPLE_RATE:
            moderate = np.flatnonzero(np.abs(self.tau * self.op.eigenvalues) <= ORACLE_MAX_PHASE)[:4]
            lam = 1.0 + self.source.r
            for index in moderate:
                z = complex(self.op.eigenvalues[index])
                value = complex(kernel_weight_array(lam, t_n, self.tau, np.array([z]))[0])
                reference = kernel_weight_oracle(lam, t_n, self.tau, z)
                discrepancy = abs(value - reference) / max(abs(reference), 1e-300)
                if discrepancy > self.cross_check_tolerance:
                    raise FormulationMismatchError(
                        discrepancy, self.cross_check_tolerance, f"kernel weight at t_n={t_n:g}, z={z}"
                    )


class EQRF1Stepper(EQRFStepper):
    """EQRF1: y_{n+1} = e^(tau A) y_n + tau phi_1(tau A) h((t_n + c_1 tau)^r) v."""

    def __init__(
        self,
        op: DiagonalizableOperator,
        source: FractionalSource,
        tau: float,
        c1: float,
        debug: bool = False,
    ):
        super().__init__(op, source, tau, nodes=node_set("single", 1, c1=c1), debug=debug)


def _check_nu(nodes: NodeSet, nu: int) -> None:
    if nodes.nu != nu:
        raise NodeSetError(f"expected {nu} collocation nodes, got {nodes.nu}")


def eqrf1_step(state: State, op: DiagonalizableOperator, source: FractionalSource, c1: float, tau: float) -> State:
    return EQRF1Stepper(op, source, tau, c1=c1).step(state)


def eqrf2_step_phi(
    state: State, op: DiagonalizableOperator, source: FractionalSource, nodes: NodeSet, tau: float
) -> State:
    _check_nu(nodes, 2)
    return EQRFStepper(op, source, tau, nodes=nodes, formulation="fractional_phi").step(state)


def eqrf2_step_integral(
    state: State,
    op: DiagonalizableOperator,
    source: FractionalSource,
    nodes: NodeSet,
    tau: float,
    n_quad: int = DEFAULT_QUADRATURE_NODES,
    graded: bool = True,
) -> State:
    _check_nu(nodes, 2)
    stepper = EQRFStepper(op, source, tau, nodes=nodes, formulation="integral_quadrature", n_quad=n_quad, graded=graded)
    return stepper.step(state)


def eqrfnu_step(
    state: State,
    op: DiagonalizableOperator,
    source: FractionalSource,
    nodes: NodeSet,
    tau: float,
    formulation: Formulation = "fractional_phi",
) -> State:
    """One EQRF-nu step; nu = 1 and nu = 2 reproduce EQRF1 and EQRF2."""
    return EQRFStepper(op, source, tau, nodes=nodes, formulation=formulation).step(state)
