"""
Time-marching schemes over a constant time grid.
"""

from eqrf.integrators.base import FractionalSource, Method, StepWeights, Stepper, TimeGrid, march, march_modal
from eqrf.integrators.classical import CEQR2Stepper, ceqr2_step
from eqrf.integrators.fractional import (
    EQRF1Stepper,
    EQRFStepper,
    eqrf1_step,
    eqrf2_step_integral,
    eqrf2_step_phi,
    eqrfnu_step,
)
from eqrf.integrators.weights import (
    FractionalPhiWeights,
    QuadratureWeights,
    graded_panels,
    interp_coefficients,
    interpolation_scalars,
    kernel_weight,
    kernel_weight_array,
    kernel_weight_oracle,
)

__all__ = [
    "CEQR2Stepper",
    "EQRF1Stepper",
    "EQRFStepper",
    "FractionalPhiWeights",
    "FractionalSource",
    "Method",
    "QuadratureWeights",
    "StepWeights",
    "Stepper",
    "TimeGrid",
    "ceqr2_step",
    "eqrf1_step",
    "eqrf2_step_integral",
    "eqrf2_step_phi",
    "eqrfnu_step",
    "graded_panels",
    "interp_coefficients",
    "interpolation_scalars",
    "kernel_weight",
    "kernel_weight_array",
    "kernel_weight_oracle",
    "march",
    "march_modal",
]
