"""
Kernel weights and interpolation coefficients of the fractional quadrature rules.

One EQRF-nu step needs, for every basis power j = 1..nu-1,

    W_j = int_0^tau exp((tau - s) Lambda) (t_n + s)^(j r) ds

evaluated on the spectrum. Two interchangeable calculators provide them:
`FractionalPhiWeights` through fractional phi functions (recomputed every
step) and `QuadratureWeights` through a fixed-node rule whose propagator
samples are computed once per run.
"""

import logging
import math
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from eqrf.exceptions import InterpolationError, OscillationError, PhiAccuracyError, PhiDomainError
from eqrf.integrators.base import FractionalSource, StepWeights
from eqrf.quadrule import NodeSet, gauss_legendre, power_weight_rule
from eqrf.specialfun import ACCURACY_LIMIT, ASYMPTOTIC_RADIUS, PhiOrder, algebraic_tail, gamma_real, phi_frac_array
from eqrf.types import ArrayLike, ComplexArray, Formulation, ScalarSource

INTERPOLATION_RESIDUAL = 1e-12
DEFAULT_QUADRATURE_NODES = 16
PANEL_SCALE = 8.0
MAX_PANELS = 52
ORACLE_MAX_PHASE = 50.0

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny


def _order(order: Union[PhiOrder, float, int]) -> float:
    return order.lam if isinstance(order, PhiOrder) else PhiOrder(float(order)).lam


def _check_step(t_n: float, tau: float) -> None:
    if not (math.isfinite(t_n) and t_n >= 0.0):
        raise PhiDomainError(f"t_n must be nonnegative and finite, got {t_n}")
    if not (math.isfinite(tau) and tau > 0.0):
        raise PhiDomainError(f"tau must be positive and finite, got {tau}")


def kernel_weight_array(order: Union[PhiOrder, float, int], t_n: float, tau: float, z: ArrayLike) -> ComplexArray:
    """
    Gamma(lam) * ((t_n + tau)^lam phi_lam((t_n + tau) z) - t_n^lam e^(tau z) phi_lam(t_n z)), elementwise.

    Equals int_0^tau e^((tau - s) z) (t_n + s)^(lam - 1) ds. When both
    arguments are in the large-|z| regime the exponential parts of the two
    terms cancel exactly, so only the algebraic tails are combined.
    """
    lam = _order(order)
    _check_step(t_n, tau)
    zz = np.asarray(z, dtype=np.complex128)
    scale = gamma_real(lam)
    t_next = t_n + tau
    if t_n == 0.0:
        return scale * t_next**lam * phi_frac_array(lam, t_next * zz)

    flat = zz.reshape(-1)
    out = np.empty(flat.shape, dtype=np.complex128)
    far = (np.abs(t_next * flat) > ASYMPTOTIC_RADIUS) & (np.abs(t_n * flat) > ASYMPTOTIC_RADIUS)

    near = ~far
    if np.any(near):
        zn = flat[near]
        leading = t_next**lam * phi_frac_array(lam, t_next * zn)
        trailing = t_n**lam * np.exp(tau * zn) * phi_frac_array(lam, t_n * zn)
        out[near] = scale * (leading - trailing)

    if np.any(far):
        zf = flat[far]
        tail_next, omitted_next = algebraic_tail(lam, t_next * zf)
        tail_now, omitted_now = algebraic_tail(lam, t_n * zf)
        decay = np.exp(tau * zf)
        values = scale * (t_next**lam * tail_next - t_n**lam * decay * tail_now)
        omitted = scale * (t_next**lam * omitted_next + t_n**lam * np.abs(decay) * omitted_now)
        est = omitted / np.maximum(np.abs(values), _TINY)
        if np.any(est > ACCURACY_LIMIT):
            worst = int(np.argmax(est))
            raise PhiAccuracyError(complex(values[worst]), float(est[worst]), "kernel weight tail did not converge")
        out[far] = values

    return out.reshape(zz.shape)


def kernel_weight(order: Union[PhiOrder, float, int], t_n: float, tau: float, z: complex) -> complex:
    """Scalar kernel weight; see `kernel_weight_array`."""
    return complex(kernel_weight_array(order, t_n, tau, np.array([z]))[0])


def kernel_weight_oracle(
    order: Union[PhiOrder, float, int], t_n: float, tau: float, z: complex, rel_tol: float = 1e-13
) -> complex:
    """
    Brute-force quadrature of int_0^tau e^((tau - s) z) (t_n + s)^(lam - 1) ds.

    At t_n = 0 the algebraic factor s^(lam - 1) is handed to QUADPACK as an
    'alg' weight so the endpoint singularity costs nothing.

    Adaptive Gauss-Kronrod loses all accuracy on strongly oscillating
    integrands without reporting it, so the phase tau |z| is capped at
    ORACLE_MAX_PHASE; larger arguments raise OscillationError.
    """
    lam = _order(order)
    _check_step(t_n, tau)
    zc = complex(z)
    if tau * abs(zc) > ORACLE_MAX_PHASE:
        raise OscillationError(f"tau |z| = {tau * abs(zc):.3e} exceeds the oracle phase limit {ORACLE_MAX_PHASE:g}")

    singular = t_n == 0.0
    options: Dict[str, Any] = {"weight": "alg", "wvar": (lam - 1.0, 0.0)} if singular else {}

    def kernel(s: float) -> complex:
        value = complex(np.exp((tau - s) * zc))
        return value if singular else value * (t_n + s) ** (lam - 1.0)

    def part(component: Callable[[complex], float]) -> float:
        result, _ = integrate.quad(
            lambda s: component(kernel(s)), 0.0, tau, epsabs=1e-16, epsrel=rel_tol, limit=500, **options
        )
        return float(result)

    return complex(part(lambda v: v.real), part(lambda v: v.imag))


def node_abscissae(nodes: NodeSet, r: float, t_n: float, tau: float) -> np.ndarray:
    """Interpolation variables w_i = (t_n + c_i tau)^r."""
    return np.array([(t_n + c * tau) ** r for c in nodes.c])


def interpolation_scalars(nodes: NodeSet, h: ScalarSource, r: float, t_n: float, tau: float) -> np.ndarray:
    """
    Coefficients a_j with sum_j a_j w_i^j = h(w_i) at every node.

    nu = 1 and nu = 2 use closed forms; nu >= 3 solves the generalized
    Vandermonde system with column equilibration and checks the residual
    against the scale of the data and of the expansion.
    """
    w = node_abscissae(nodes, r, t_n, tau)
    samples = np.array([complex(h(wi)) for wi in w], dtype=np.complex128)
    nu = nodes.nu
    if nu == 1:
        return samples
    if nu == 2:
        gap = w[1] - w[0]
        return np.array([(w[1] * samples[0] - w[0] * samples[1]) / gap, (samples[1] - samples[0]) / gap])
    return _solve_vandermonde(w, samples)


def _solve_vandermonde(w: np.ndarray, samples: np.ndarray) -> np.ndarray:
    vandermonde = np.power.outer(w, np.arange(w.size)).astype(float)
    columns = np.max(np.abs(vandermonde), axis=0)
    columns[columns == 0.0] = 1.0
    try:
        scaled = np.linalg.solve(vandermonde / columns, samples)
    except np.linalg.LinAlgError as exc:
        raise InterpolationError(math.inf, 0.0) from exc
    coefficients = scaled / columns

    residual = float(np.max(np.abs(vandermonde @ coefficients - samples)))
    magnitude = max(float(np.max(np.abs(samples))), float(np.max(np.abs(vandermonde) @ np.abs(coefficients))))
    bound = INTERPOLATION_RESIDUAL * magnitude
    if residual > bound:
        raise InterpolationError(residual, bound)
    return coefficients


def interp_coefficients(nodes: NodeSet, source: FractionalSource, t_n: float, tau: float) -> List[ComplexArray]:
    """alpha_j = a_j * v, j = 0..nu-1, in physical coordinates."""
    scalars = interpolation_scalars(nodes, source.h, source.r, t_n, tau)
    profile = np.asarray(source.profile, dtype=np.complex128)
    return [a_j * profile for a_j in scalars]


class WeightCalculator:
    """
    Step weights (W_0, W_1, ..., W_{nu-1}) for one step size.

    W_0 = tau phi_1(tau Lambda) is shared by both formulations; subclasses
    provide the fractional weights j >= 1.
    """

    formulation: Formulation

    def __init__(self, eigenvalues: ComplexArray, tau: float, r: float, nu: int, phi1: ComplexArray):
        self.eigenvalues = eigenvalues
        self.tau = tau
        self.r = r
        self.nu = nu
        self.phi1 = phi1

    def fractional_weights(self, t_n: float) -> List[ComplexArray]:
        raise NotImplementedError()  # pragma: no cover

    def step_weights(self, t_n: float) -> StepWeights:
        return StepWeights(weights=(self.phi1, *self.fractional_weights(t_n)), formulation=self.formulation)

    def combine(self, coefficients: np.ndarray, t_n: float) -> ComplexArray:
        """sum_j a_j W_j on the spectrum."""
        if self.nu == 1:
            return coefficients[0] * self.phi1
        return self.step_weights(t_n).combine(coefficients)


class FractionalPhiWeights(WeightCalculator):
    """W_j = kernel weight of order 1 + j r, recomputed at every t_n."""

    formulation: Formulation = "fractional_phi"

    def fractional_weights(self, t_n: float) -> List[ComplexArray]:
        return [kernel_weight_array(1.0 + j * self.r, t_n, self.tau, self.eigenvalues) for j in range(1, self.nu)]


def graded_panels(stiffness: float, scale: float = PANEL_SCALE) -> np.ndarray:
    """
    Panel edges on [0, 1] that halve in width toward 1.

    Enough panels are cut for exp(-stiffness (1 - sigma)) to vary by at most
    `scale` e-folds across the last one; a mild decay keeps the single panel [0, 1].
    """
    if not stiffness > scale:
        return np.array([0.0, 1.0])
    count = min(1 + math.ceil(math.log2(stiffness / scale)), MAX_PANELS)
    return np.append(1.0 - 0.5 ** np.arange(count), 1.0)


class QuadratureWeights(WeightCalculator):
    """
    W_j by a composite n_quad-point rule on [0, tau].

    With `graded=True` the interval is cut by `graded_panels` according to
    the fastest decaying mode, tau max(-Re Lambda), so the boundary layer of
    e^((tau - s) Lambda) at s = tau is resolved for stiff spectra.
    `graded=False` keeps the single-panel rule. Grading does not help modes
    with a large phase tau |Im Lambda|; those need more nodes per panel.

    t_n = 0: the panel touching s = 0 uses Gauss-Jacobi with weight s^(j r),
    the other panels Gauss-Legendre with the factor s^(j r) sampled.
    t_n > 0: Gauss-Legendre on every panel, W_j = tau sum_i w_i e^(tau (1 - sigma_i) Lambda) (t_n + tau sigma_i)^(j r).

    The propagator samples e^(tau (1 - sigma_i) Lambda) are computed here, once.
    """

    formulation: Formulation = "integral_quadrature"

    def __init__(
        self,
        eigenvalues: ComplexArray,
        tau: float,
        r: float,
        nu: int,
        phi1: ComplexArray,
        n_quad: int = DEFAULT_QUADRATURE_NODES,
        graded: bool = True,
    ):
        super().__init__(eigenvalues, tau, r, nu, phi1)
        stiffness = tau * float(np.max(-np.real(eigenvalues), initial=0.0)) if graded else 0.0
        self.edges = graded_panels(stiffness)
        rule = gauss_legendre(n_quad)
        lower, widths = self.edges[:-1], np.diff(self.edges)
        self.nodes = (lower[:, None] + widths[:, None] * rule.nodes).ravel()
        self.quad_weights = (widths[:, None] * rule.weights).ravel()
        self.propagators = self._samples(self.nodes)
        logger.debug("integral quadrature: %d panels of %d nodes", widths.size, n_quad)

        # t_n = 0: Gauss-Jacobi on [0, b], the remaining panels reuse the samples above
        b = float(self.edges[1])
        self.first_step: List[Tuple[np.ndarray, ComplexArray]] = []
        for j in range(1, nu):
            exponent = j * r
            singular = power_weight_rule(n_quad, exponent)
            weights = np.concatenate(
                [b ** (1.0 + exponent) * singular.weights, self.quad_weights[n_quad:] * self.nodes[n_quad:] ** exponent]
            )
            samples = np.concatenate([self._samples(b * singular.nodes), self.propagators[n_quad:]])
            self.first_step.append((weights, samples))

    def _samples(self, sigma: Sequence[float]) -> ComplexArray:
        return np.exp(np.multiply.outer(self.tau * (1.0 - np.asarray(sigma)), self.eigenvalues))

    def fractional_weights(self, t_n: float) -> List[ComplexArray]:
        if t_n == 0.0:
            return [
                self.tau ** (1.0 + j * self.r) * (weights @ samples)
                for j, (weights, samples) in enumerate(self.first_step, start=1)
            ]
        times = t_n + self.tau * self.nodes
        return [self.tau * ((self.quad_weights * times ** (j * self.r)) @ self.propagators) for j in range(1, self.nu)]

    def combine(self, coefficients: np.ndarray, t_n: float) -> ComplexArray:
        if self.nu == 1 or t_n == 0.0:
            return super().combine(coefficients, t_n)
        # fold the scalar coefficients first: one (nodes x dim) product per step
        times = t_n + self.tau * self.nodes
        folded = sum(coefficients[j] * times ** (j * self.r) for j in range(1, self.nu))
        return coefficients[0] * self.phi1 + (self.tau * self.quad_weights * folded) @ self.propagators
