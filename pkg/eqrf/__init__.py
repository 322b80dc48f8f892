"""
EQRF - exponential quadrature rules for stiff linear ODEs with fractional sources.
"""

from eqrf.integrators import CEQR2Stepper as CEQR2Stepper
from eqrf.integrators import EQRF1Stepper as EQRF1Stepper
from eqrf.integrators import EQRFStepper as EQRFStepper
from eqrf.integrators import FractionalSource as FractionalSource
from eqrf.integrators import Method as Method
from eqrf.integrators import TimeGrid as TimeGrid
from eqrf.integrators import ceqr2_step as ceqr2_step
from eqrf.integrators import eqrf1_step as eqrf1_step
from eqrf.integrators import eqrf2_step_integral as eqrf2_step_integral
from eqrf.integrators import eqrf2_step_phi as eqrf2_step_phi
from eqrf.integrators import eqrfnu_step as eqrfnu_step
from eqrf.integrators import interp_coefficients as interp_coefficients
from eqrf.integrators import kernel_weight as kernel_weight
from eqrf.integrators import march as march
from eqrf.operators import State as State
from eqrf.operators import apply_expm as apply_expm
from eqrf.operators import apply_phi as apply_phi
from eqrf.operators import diagonal_operator as diagonal_operator
from eqrf.operators import dirichlet_fd_variable_coefficient as dirichlet_fd_variable_coefficient
from eqrf.operators import periodic_spectral_second_derivative as periodic_spectral_second_derivative
from eqrf.problems import BenchmarkProblem as BenchmarkProblem
from eqrf.problems import discretize as discretize
from eqrf.problems import preset as preset
from eqrf.problems import reference_solution as reference_solution
from eqrf.problems import terminal_error as terminal_error
from eqrf.quadrule import gauss_jacobi as gauss_jacobi
from eqrf.quadrule import gauss_legendre as gauss_legendre
from eqrf.quadrule import node_relation_residual as node_relation_residual
from eqrf.quadrule import node_set as node_set
from eqrf.specialfun import PhiOrder as PhiOrder
from eqrf.specialfun import gamma_real as gamma_real
from eqrf.specialfun import phi_classical as phi_classical
from eqrf.specialfun import phi_frac as phi_frac
from eqrf.specialfun import phi_frac_oracle as phi_frac_oracle
from eqrf.specialfun import phi_frac_report as phi_frac_report
from eqrf.study import StudySpec as StudySpec
from eqrf.study import fit_order as fit_order
from eqrf.study import run_study as run_study

__version__ = "0.1.0"
