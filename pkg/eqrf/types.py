"""
Shared type aliases for the EQRF toolkit.

Literal aliases double as pydantic field types in study files, so the
accepted spellings live in one place.
"""

from typing import Callable, Literal, TypedDict, Union

import numpy as np
import numpy.typing as npt

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]
ArrayLike = Union[complex, float, npt.ArrayLike]

ScalarSource = Callable[[complex], complex]
"""The scalar part h of a fractional source g(t) = h(t^r) v."""

CoefficientFunction = Callable[[RealArray], RealArray]
"""Spatial coefficient a(x) of a variable-coefficient diffusion operator."""

PhiMethod = Literal[
    "taylor_series",
    "gauss_jacobi_integral",
    "asymptotic_plus_exponential",
    "integral_oracle",
]
"""Branch that produced a fractional phi value."""

NodeFamily = Literal["single", "trapezoid", "gauss", "gauss_radau", "gauss_lobatto", "custom"]
"""Named collocation node families."""

OperatorKind = Literal["fourier_diagonal", "symmetric_eig", "diagonal"]
"""Diagonalization backend of an operator."""

OperatorFamily = Literal["periodic", "dirichlet", "diagonal"]
"""Operator families a benchmark problem can be built on."""

Formulation = Literal["fractional_phi", "integral_quadrature"]
"""How the fractional kernel weights of EQRF-nu are computed."""

Scheme = Literal["eqrf1", "eqrf", "ceqr2"]
"""Time-marching scheme families."""

PresetName = Literal["scalar_intro", "perbc", "per", "perrad", "heat"]
"""Benchmark problem presets."""

SourceKind = Literal["power", "exp_power", "polynomial"]
"""Scalar part h(x) of the source: x, e^x, or an explicit polynomial in x."""

ProfileName = Literal["one", "inv_2_plus_cos", "identity", "sin_2pi", "bubble", "bubble4"]
"""Named spatial profiles sampled on an operator grid."""

CoefficientName = Literal["constant", "heat"]
"""Named coefficient functions a(x) for the Dirichlet operator."""

ReferenceMethod = Literal["closed_form", "phi_series", "per_mode_quadrature", "fine_march"]
"""Route used to compute a reference solution."""

SuiteName = Literal["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "props"]
"""Acceptance suites."""


class ReportRow(TypedDict):
    """One CSV row of a convergence report."""

    method: str
    formulation: str
    nodes: str
    N: int
    error: float
    seconds: float


class MethodSummary(TypedDict, total=False):
    """Per-method entry of the JSON study summary."""

    slope: float
    residual: float
    expected_order: float
    passed: bool
    median_seconds: float
