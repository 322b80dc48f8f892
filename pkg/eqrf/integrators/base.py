"""
Time grid, fractional source, stepper base class and the march driver.

Steppers work in modal coordinates: the march transforms the initial state
once, advances the modal vector N times, and transforms back once. Per-run
quantities (exp(tau Lambda), tau phi_1(tau Lambda), ...) are computed in the
stepper constructor; the Method wrapper defers that construction until the
operator, source and step size are known.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Type

import numpy as np

from eqrf.exceptions import NonFiniteStateError, OperatorError
from eqrf.operators import DiagonalizableOperator, State, modal_phi
from eqrf.types import ComplexArray, Formulation, ScalarSource

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeGrid:
    """Constant step grid t_n = n * tau, n = 0..N, tau = T / N."""

    T: float
    N: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"final time must be positive, got {self.T}")
        if self.N < 1:
            raise ValueError(f"number of steps must be positive, got {self.N}")

    @property
    def tau(self) -> float:
        return self.T / self.N

    def time(self, n: int) -> float:
        # n * tau drifts; n * T / N hits T exactly at n = N
        return n * self.T / self.N


@dataclass(frozen=True)
class FractionalSource:
    """
    Source g(t) = h(t^r) * profile with 0 < r < 1.

    `h` is a scalar function of x = t^r (complex values allowed); `profile`
    is the spatial vector sampled on the operator grid.
    """

    r: float
    h: ScalarSource
    profile: ComplexArray = field(repr=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"fractional exponent r must lie in (0, 1), got {self.r}")

    def scalar(self, t: float) -> complex:
        """h(t^r)."""
        return complex(self.h(t**self.r))

    def evaluate(self, t: float) -> ComplexArray:
        """g(t) = h(t^r) * profile."""
        return self.scalar(t) * np.asarray(self.profile, dtype=np.complex128)


@dataclass(frozen=True)
class StepWeights:
    """
    Modal weights W_j multiplying the interpolation coefficients alpha_j of one step.

    y_{n+1} = exp(tau Lambda) y_n + sum_j W_j alpha_j.
    """

    weights: tuple
    formulation: Formulation

    def combine(self, coefficients: np.ndarray) -> ComplexArray:
        """sum_j coefficients[j] * W_j."""
        total = coefficients[0] * self.weights[0]
        for a_j, w_j in zip(coefficients[1:], self.weights[1:]):
            total = total + a_j * w_j
        return total


class Stepper:
    """
    Base class for one-step exponential quadrature rules on a fixed step size.

    Subclasses implement `advance`, which maps the modal vector at t_n to the
    modal vector at t_n + tau.
    """

    label: str = "stepper"

    def __init__(self, op: DiagonalizableOperator, source: FractionalSource, tau: float, debug: bool = False):
        if not (math.isfinite(tau) and tau > 0.0):
            raise ValueError(f"step size must be positive, got {tau}")
        if np.shape(source.profile) != (op.dim,):
            raise OperatorError(f"source profile has shape {np.shape(source.profile)}, operator dim is {op.dim}")
        self.op = op
        self.source = source
        self.tau = float(tau)
        self.debug = debug
        self.profile_modal = op.to_modal(source.profile)
        self.expm = modal_phi(op, 0, self.tau)
        self.phi1 = self.tau * modal_phi(op, 1, self.tau)

    def advance(self, y_modal: ComplexArray, t_n: float) -> ComplexArray:
        raise NotImplementedError()  # pragma: no cover

    def step(self, state: State) -> State:
        """One step from a physical-space state at time state.time."""
        y_modal = self.op.to_modal(state.values)
        y_next = self.advance(y_modal, state.time)
        return State(values=self.op.from_modal(y_next), time=state.time + self.tau)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(label={self.label!r}, tau={self.tau!r})"


class Method:
    """
    Method descriptor: stepper class plus keyword arguments, instantiated lazily.

    Example:
        method = Method(EQRFStepper, nodes=node_set("gauss", 2), formulation="integral_quadrature")
        stepper = method.build(op, source, tau)

        cls, kwargs = method
    """

    def __init__(self, stepper_class: Type[Stepper], **kwargs: Any):
        self.cls = stepper_class
        self.kwargs = kwargs

    def build(self, op: DiagonalizableOperator, source: FractionalSource, tau: float, debug: bool = False) -> Stepper:
        return self.cls(op, source, tau, debug=debug, **self.kwargs)

    def __iter__(self) -> Iterator[Any]:
        """Allow unpacking: cls, kwargs = method"""
        return iter([self.cls, self.kwargs])

    def __repr__(self) -> str:
        kwargs_str = ", ".join(f"{k}={v!r}" for k, v in self.kwargs.items())
        parts = [self.cls.__name__]
        if kwargs_str:
            parts.append(kwargs_str)
        return f"Method({', '.join(parts)})"


def march_modal(stepper: Stepper, y0_modal: ComplexArray, grid: TimeGrid) -> ComplexArray:
    """N steps of `stepper` in modal coordinates."""
    y = np.asarray(y0_modal, dtype=np.complex128)
    for n in range(grid.N):
        y = stepper.advance(y, grid.time(n))
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(n + 1)
    return y


def march(
    initial: State,
    op: DiagonalizableOperator,
    source: FractionalSource,
    grid: TimeGrid,
    method: Method,
    debug: bool = False,
) -> State:
    """
    Advance `initial` from t = 0 to t = T with N constant steps.

    Deterministic given its inputs; returns y_N with time = T.
    """
    if initial.dim != op.dim:
        raise OperatorError(f"initial state has dim {initial.dim}, operator dim is {op.dim}")
    stepper = method.build(op, source, grid.tau, debug=debug)
    logger.debug("march %r over T=%g with N=%d", stepper, grid.T, grid.N)
    y_modal = march_modal(stepper, op.to_modal(initial.values), grid)
    return State(values=op.from_modal(y_modal), time=grid.T)
