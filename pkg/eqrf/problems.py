"""
Benchmark problems y' = A y + h(t^r) v and their reference solutions.

A problem is a frozen pydantic document (operator, source, initial profile,
final time). `discretize` turns it into the numerical objects the
integrators consume; `reference_solution` computes y(T) independently of
the time steppers under test.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Literal, Mapping, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from typing_extensions import Annotated, Doc

from eqrf.exceptions import OperatorError, OscillationError, ReferenceAccuracyError, StudySpecError
from eqrf.integrators.base import FractionalSource, Method, TimeGrid, march
from eqrf.integrators.fractional import EQRFStepper
from eqrf.integrators.weights import kernel_weight_array
from eqrf.operators import (
    DiagonalizableOperator,
    State,
    diagonal_operator,
    dirichlet_fd_variable_coefficient,
    modal_phi,
    periodic_spectral_second_derivative,
)
from eqrf.quadrule import QuadRule, gauss_legendre, node_set
from eqrf.types import (
    CoefficientName,
    OperatorFamily,
    PresetName,
    ProfileName,
    RealArray,
    ReferenceMethod,
    SourceKind,
)

logger = logging.getLogger(__name__)

DEFAULT_REFERENCE_TOLERANCE = 1e-12
SERIES_CUTOFF = 1e-18
MAX_SERIES_TERMS = 200
DEFAULT_FINE_STEPS = 2**12

PANEL_PHASE = 10.0
ZERO_GRADING = 0.2
ZERO_LEVELS = 24
OSCILLATION_BUDGET = 2e5
NEGLIGIBLE_MODE = 1e-3


PROFILES: Dict[str, Callable[[RealArray], RealArray]] = {
    "one": lambda x: np.ones_like(x),
    "inv_2_plus_cos": lambda x: 1.0 / (2.0 + np.cos(2.0 * np.pi * x)),
    "identity": lambda x: np.array(x, dtype=float),
    "sin_2pi": lambda x: np.sin(2.0 * np.pi * x),
    "bubble": lambda x: x * (1.0 - x),
    "bubble4": lambda x: 4.0 * x * (1.0 - x),
}

COEFFICIENTS: Dict[str, Callable[[RealArray], RealArray]] = {
    "constant": lambda x: np.ones_like(x),
    "heat": lambda x: (1.0 + x**2) / 10.0,
}


class OperatorSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Annotated[
        OperatorFamily,
        Doc(
            """
            `periodic`: zeta * d_xx with periodic conditions, Fourier pseudospectral.
            `dirichlet`: a(x) * d_xx with homogeneous Dirichlet conditions, finite differences.
            `diagonal`: explicit eigenvalues (scalar test equations).
            """
        ),
    ]
    size: Annotated[int, Field(ge=1), Doc("Number of modes (periodic) or inner grid points (dirichlet).")] = 1
    zeta: Annotated[Tuple[float, float], Doc("Complex factor of the periodic operator as (re, im).")] = (1.0, 0.0)
    coefficient: CoefficientName = "constant"
    eigenvalues: Annotated[
        Tuple[Tuple[float, float], ...],
        Doc("Eigenvalues of a diagonal operator as (re, im) pairs."),
    ] = ()

    @model_validator(mode="after")
    def _check_family(self) -> "OperatorSpec":
        if self.family == "periodic" and self.size % 2:
            raise ValueError("periodic operators need an even number of modes")
        if self.family == "diagonal" and len(self.eigenvalues) != self.size:
            raise ValueError("diagonal operators need exactly `size` eigenvalues")
        return self


class SourceSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Annotated[SourceKind, Doc("h(x) = x (power), e^x (exp_power) or sum_j c_j x^j (polynomial).")]
    r: Annotated[float, Field(gt=0.0, lt=1.0), Doc("Fractional exponent of the time variable, 0 < r < 1.")]
    profile: ProfileName = "one"
    coefficients: Tuple[float, ...] = ()

    @model_validator(mode="after")
    def _check_coefficients(self) -> "SourceSpec":
        if self.kind == "polynomial" and not self.coefficients:
            raise ValueError("polynomial sources need explicit coefficients")
        if self.kind != "polynomial" and self.coefficients:
            raise ValueError(f"{self.kind} sources take no coefficients")
        return self

    def scalar(self) -> Callable[[Any], Any]:
        """h as a numpy-vectorized callable."""
        if self.kind == "power":
            return lambda x: x
        if self.kind == "exp_power":
            return np.exp
        coefficients = np.array(self.coefficients)
        return lambda x: np.polynomial.polynomial.polyval(x, coefficients)

    def series(self) -> Iterator[float]:
        """Power-series coefficients of h in x = t^r."""
        if self.kind == "power":
            yield from (0.0, 1.0)
        elif self.kind == "polynomial":
            yield from self.coefficients
        else:
            j = 0
            while True:
                yield 1.0 / math.factorial(j)
                j += 1

    @property
    def finite_series(self) -> bool:
        return self.kind != "exp_power"


class BenchmarkProblem(BaseModel):
    """
    A linear test problem y' = A y + h(t^r) v, y(0) = y_0, on [0, T].

    Instances are immutable; use `with_overrides` (or `preset(name, **overrides)`)
    to derive variants.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Annotated[Union[PresetName, Literal["custom"]], Doc("Preset the problem derives from.")] = "custom"
    operator: OperatorSpec
    source: SourceSpec
    initial: ProfileName
    T: Annotated[float, Field(gt=0.0), Doc("Final time.")]

    @field_validator("T")
    @classmethod
    def _finite_time(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("final time must be finite")
        return value

    def with_overrides(self, **overrides: Any) -> "BenchmarkProblem":
        """
        Derive a problem from flat override keys.

        `size`, `zeta`, `coefficient`, `eigenvalues` go to the operator;
        `r`, `profile`, `coefficients` and `source_kind` to the source;
        `T` and `initial` to the problem itself.
        """
        document = self.model_dump()
        unknown = []
        for key, value in overrides.items():
            if key in _OPERATOR_KEYS:
                document["operator"][key] = value
            elif key in _SOURCE_KEYS:
                document["source"][_SOURCE_KEYS[key]] = value
            elif key in ("T", "initial", "name"):
                document[key] = value
            else:
                unknown.append({"loc": ("overrides", key), "msg": "unknown override", "type": "extra_forbidden"})
        if unknown:
            raise StudySpecError(unknown, source=overrides)
        return parse_problem(document)


_OPERATOR_KEYS = {"size", "zeta", "coefficient", "eigenvalues"}
_SOURCE_KEYS = {"r": "r", "profile": "profile", "coefficients": "coefficients", "source_kind": "kind"}

_PERIODIC_SCHRODINGER = OperatorSpec(family="periodic", size=500, zeta=(0.0, 1.0))

PRESETS: Dict[str, BenchmarkProblem] = {
    "scalar_intro": BenchmarkProblem(
        name="scalar_intro",
        operator=OperatorSpec(family="diagonal", size=1, eigenvalues=((-1.0, 0.0),)),
        source=SourceSpec(kind="power", r=0.75, profile="one"),
        initial="one",
        T=0.1,
    ),
    "perbc": BenchmarkProblem(
        name="perbc",
        operator=_PERIODIC_SCHRODINGER,
        source=SourceSpec(kind="power", r=0.75, profile="inv_2_plus_cos"),
        initial="sin_2pi",
        T=3.0,
    ),
    "per": BenchmarkProblem(
        name="per",
        operator=_PERIODIC_SCHRODINGER,
        source=SourceSpec(kind="power", r=0.75, profile="inv_2_plus_cos"),
        initial="sin_2pi",
        T=1.0,
    ),
    "perrad": BenchmarkProblem(
        name="perrad",
        operator=_PERIODIC_SCHRODINGER,
        source=SourceSpec(kind="exp_power", r=0.75, profile="inv_2_plus_cos"),
        initial="sin_2pi",
        T=2.0,
    ),
    "heat": BenchmarkProblem(
        name="heat",
        operator=OperatorSpec(family="dirichlet", size=1000, coefficient="heat"),
        source=SourceSpec(kind="exp_power", r=0.75, profile="bubble"),
        initial="bubble4",
        T=2.0,
    ),
}


def parse_problem(document: Union[Mapping[str, Any], str]) -> BenchmarkProblem:
    """Validate a problem document (mapping or JSON text)."""
    try:
        if isinstance(document, str):
            return BenchmarkProblem.model_validate_json(document)
        return BenchmarkProblem.model_validate(document)
    except ValidationError as exc:
        raise StudySpecError(exc.errors(), source=document) from exc


def preset(name: str, **overrides: Any) -> BenchmarkProblem:
    """Named benchmark problem, optionally with flat overrides (see `BenchmarkProblem.with_overrides`)."""
    if name not in PRESETS:
        raise StudySpecError(
            [{"loc": ("problem", "name"), "msg": f"unknown preset {name!r}; known: {', '.join(PRESETS)}"}],
            source=name,
        )
    problem = PRESETS[name]
    return problem.with_overrides(**overrides) if overrides else problem


@dataclass(frozen=True)
class Discretization:
    """Numerical objects of a problem: operator, source and initial state."""

    problem: BenchmarkProblem
    op: DiagonalizableOperator
    source: FractionalSource
    initial: State

    @property
    def grid_points(self) -> RealArray:
        return self.op.sample_grid


def build_operator(spec: OperatorSpec) -> DiagonalizableOperator:
    if spec.family == "periodic":
        return periodic_spectral_second_derivative(spec.size, complex(*spec.zeta))
    if spec.family == "dirichlet":
        return dirichlet_fd_variable_coefficient(spec.size, COEFFICIENTS[spec.coefficient])
    return diagonal_operator([complex(*pair) for pair in spec.eigenvalues])


def discretize(problem: BenchmarkProblem) -> Discretization:
    op = build_operator(problem.operator)
    x = op.sample_grid
    profile = np.asarray(PROFILES[problem.source.profile](x), dtype=np.complex128)
    source = FractionalSource(r=problem.source.r, h=problem.source.scalar(), profile=profile)
    initial = State(values=np.asarray(PROFILES[problem.initial](x), dtype=np.complex128), time=0.0)
    return Discretization(problem=problem, op=op, source=source, initial=initial)


@dataclass(frozen=True)
class ReferenceSolution:
    """y(T) on the physical grid, the route that produced it and its estimated max-norm error."""

    state: State
    method: ReferenceMethod
    accuracy: float


def _phi_series(setup: Discretization) -> Tuple[np.ndarray, float]:
    """
    y(T) = e^(T Lambda) y_0 + sum_j a_j Gamma(1 + j r) T^(1 + j r) phi_{1 + j r}(T Lambda) v, modally.
    """
    op, problem = setup.op, setup.problem
    T, r = problem.T, problem.source.r
    profile = op.to_modal(setup.source.profile)
    y = modal_phi(op, 0, T) * op.to_modal(setup.initial.values)
    magnitude = float(np.max(np.abs(profile)))
    omitted = 0.0
    terms: List[float] = []
    for j, a_j in enumerate(problem.source.series()):
        if j >= MAX_SERIES_TERMS:
            raise ReferenceAccuracyError(omitted, SERIES_CUTOFF, "phi_series")
        # bound of |a_j int_0^T e^((T - s) Lambda) s^(j r) ds| for Re Lambda <= 0
        bound = abs(a_j) * T ** (1.0 + j * r) / (1.0 + j * r) * magnitude
        if a_j != 0.0:
            term = a_j * kernel_weight_array(1.0 + j * r, 0.0, T, op.eigenvalues) * profile
            y = y + term
            terms.append(float(np.max(np.abs(term))))
        if not problem.source.finite_series and j > T**r and bound <= SERIES_CUTOFF * max(1.0, magnitude):
            omitted = bound
            break
    scale = max(float(np.max(np.abs(y))), np.finfo(float).tiny)
    rounding = 16.0 * np.finfo(float).eps * (math.fsum(terms) + scale)
    return y, (omitted + rounding) / scale


def _breakpoints(lam: complex, T: float) -> np.ndarray:
    """Panel edges for int_0^T e^(lam (T - s)) h(s^r) ds: uniform in phase, graded toward 0 and toward T."""
    n_base = int(math.ceil(abs(lam.imag) * T / PANEL_PHASE)) + 1
    base = np.linspace(0.0, T, n_base + 1)
    edges = [base, base[1] * ZERO_GRADING ** np.arange(1, ZERO_LEVELS + 1)]
    decay = -lam.real
    width = base[-1] - base[-2]
    if decay * width > 1.0:
        levels = np.arange(0, int(math.ceil(math.log2(decay * width))) + 1)
        edges.append(T - 2.0**levels / decay)
    points = np.unique(np.concatenate(edges))
    return points[(points >= 0.0) & (points <= T)]


def _mode_integral(lam: complex, T: float, f: Callable[[np.ndarray], np.ndarray], rules: Tuple[QuadRule, QuadRule]):
    edges = _breakpoints(lam, T)
    left = edges[:-1, None]
    width = np.diff(edges)[:, None]
    estimates = []
    for rule in rules:
        s = left + width * rule.nodes[None, :]
        samples = np.exp(lam * (T - s)) * f(s)
        estimates.append(complex(np.sum(width * rule.weights[None, :] * samples)))
    coarse, fine = estimates
    return fine, abs(fine - coarse)


def _per_mode_quadrature(setup: Discretization, tol: float) -> Tuple[np.ndarray, float]:
    """Variation-of-constants integral per modal component by graded panel quadrature."""
    op, problem = setup.op, setup.problem
    T, r = problem.T, problem.source.r
    h = problem.source.scalar()

    def forcing(s: np.ndarray) -> np.ndarray:
        return h(s**r)

    profile = op.to_modal(setup.source.profile)
    y = modal_phi(op, 0, T) * op.to_modal(setup.initial.values)
    cutoff = NEGLIGIBLE_MODE * tol * float(np.max(np.abs(profile)))
    rules = (gauss_legendre(24), gauss_legendre(48))
    h_max = float(np.max(np.abs(forcing(np.linspace(0.0, T, 65)))))
    error = 0.0
    skipped = 0
    for k, lam in enumerate(op.eigenvalues):
        weight = profile[k]
        if abs(weight) <= cutoff:
            error = max(error, abs(weight) * h_max * T)
            skipped += 1
            continue
        if abs(lam.imag) * T > OSCILLATION_BUDGET:
            raise OscillationError(
                f"mode {k}: |Im lambda| T = {abs(lam.imag) * T:.3e} exceeds the budget {OSCILLATION_BUDGET:.0e}"
            )
        value, estimate = _mode_integral(complex(lam), T, forcing, rules)
        y[k] += value * weight
        error = max(error, estimate * abs(weight))
    logger.debug("per-mode quadrature: %d of %d modes below cutoff", skipped, op.dim)
    return y, error / max(float(np.max(np.abs(y))), np.finfo(float).tiny)


def _fine_march(setup: Discretization, steps: int) -> Tuple[np.ndarray, float]:
    method = Method(EQRFStepper, nodes=node_set("gauss_lobatto", 3), formulation="fractional_phi")
    problem = setup.problem
    fine = march(setup.initial, setup.op, setup.source, TimeGrid(problem.T, steps), method)
    coarse = march(setup.initial, setup.op, setup.source, TimeGrid(problem.T, max(steps // 2, 1)), method)
    difference = float(np.max(np.abs(fine.values - coarse.values)))
    return setup.op.to_modal(fine.values), difference / max(float(np.max(np.abs(fine.values))), np.finfo(float).tiny)


def reference_solution(
    problem: Union[BenchmarkProblem, Discretization],
    tol: float = DEFAULT_REFERENCE_TOLERANCE,
    method: Union[ReferenceMethod, Literal["auto"]] = "auto",
    fine_steps: int = DEFAULT_FINE_STEPS,
) -> ReferenceSolution:
    """
    y(T) for a problem with source h(t^r) v.

    `auto` uses the phi-function series of h (exact for power and polynomial
    sources, truncated for e^x); `per_mode_quadrature` and `fine_march` are
    independent routes for cross-checking. Raises `ReferenceAccuracyError`
    when the estimated relative error exceeds `tol`.
    """
    setup = problem if isinstance(problem, Discretization) else discretize(problem)
    if method == "auto":
        method = "closed_form" if setup.problem.source.finite_series else "phi_series"

    if method in ("closed_form", "phi_series"):
        modal, accuracy = _phi_series(setup)
    elif method == "per_mode_quadrature":
        modal, accuracy = _per_mode_quadrature(setup, tol)
    elif method == "fine_march":
        modal, accuracy = _fine_march(setup, fine_steps)
    else:
        raise ValueError(f"unknown reference method {method!r}")

    values = setup.op.from_modal(modal)
    logger.info("reference for %s via %s, estimated relative error %.2e", setup.problem.name, method, accuracy)
    if accuracy > tol:
        raise ReferenceAccuracyError(accuracy, tol, method)
    return ReferenceSolution(state=State(values=values, time=setup.problem.T), method=method, accuracy=accuracy)


def terminal_error(y_N: State, ref: Union[ReferenceSolution, State]) -> float:
    """Discrete max-norm of y_N - y(T) on the physical grid."""
    target = ref.state if isinstance(ref, ReferenceSolution) else ref
    if y_N.dim != target.dim:
        raise OperatorError(f"state dimension {y_N.dim} does not match reference dimension {target.dim}")
    return float(np.max(np.abs(y_N.values - target.values)))
