"""
Acceptance suites: the figure reproductions and the numerical property checks.

Each figure suite runs the shipped study file `eqrf/studies/<suite>.json`
and turns its summary, spot checks and suite-specific comparisons into a
list of `Criterion` results. `props` runs the special-function, quadrature,
exactness and reference cross-checks directly.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union, get_args

import numpy as np
from scipy.special import gamma

from eqrf.integrators.base import Method, TimeGrid, march
from eqrf.integrators.fractional import EQRFStepper
from eqrf.integrators.weights import kernel_weight, kernel_weight_oracle
from eqrf.problems import BenchmarkProblem, OperatorSpec, SourceSpec, discretize, preset, reference_solution
from eqrf.quadrule import gauss_jacobi, node_relation_residual, node_set
from eqrf.specialfun import phi_frac, phi_frac_array, phi_frac_oracle
from eqrf.study import ConvergenceReport, StudySpec, parse_studies, run_study
from eqrf.types import SuiteName

logger = logging.getLogger(__name__)

SUITES: Tuple[str, ...] = get_args(SuiteName)

FORMULATION_AGREEMENT = 1e-10
REFERENCE_AGREEMENT = 1e-10
OSCILLATION_RESIDUAL_FACTOR = 3.0


@dataclass(frozen=True)
class Criterion:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class SuiteResult:
    suite: str
    criteria: List[Criterion] = field(default_factory=list)
    reports: List[ConvergenceReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.criteria) and all(c.passed for c in self.criteria)

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        criterion = Criterion(name, bool(passed), detail)
        logger.info("%s %s", self.suite, criterion)
        self.criteria.append(criterion)


def shipped_studies(suite: str) -> List[StudySpec]:
    """Studies of a figure suite, read from the package data."""
    resource = resources.files("eqrf").joinpath("studies", f"{suite}.json")
    return parse_studies(json.loads(resource.read_text()), source=str(resource))


def check_report(result: SuiteResult, spec: StudySpec, report: ConvergenceReport) -> None:
    """Order, error-bound and spot-value criteria of one study."""
    for method in spec.methods:
        entry = report.summary.get(method.label, {})
        if method.expected_order is not None:
            slope = entry.get("slope", math.nan)
            result.check(
                f"{spec.name} {method.label} order",
                bool(entry.get("passed")),
                f"fitted {slope:.3f}, expected {method.expected_order} +- {method.order_tolerance}",
            )
        if method.max_error is not None:
            worst = max(error for _, error in report.series(method.label))
            result.check(
                f"{spec.name} {method.label} error bound",
                worst <= method.max_error,
                f"max error {worst:.3e}, bound {method.max_error:.0e}",
            )
    for spot in spec.spot_checks:
        error = report.error(spot.method, spot.N)
        deviation = abs(error - spot.error) / spot.error
        result.check(
            f"{spec.name} {spot.method} N={spot.N} spot value",
            deviation <= spot.rel_tol,
            f"{error:.6e} vs published {spot.error:.6e} ({deviation:.2%}, tolerance {spot.rel_tol:.0%})",
        )


def _run_figure(suite: str, out_dir: Optional[Path], debug: bool, keep_states: bool = False) -> SuiteResult:
    result = SuiteResult(suite)
    for spec in shipped_studies(suite):
        report = run_study(spec, debug=debug, keep_states=keep_states)
        if out_dir is not None:
            report.write(out_dir)
        result.reports.append(report)
        check_report(result, spec, report)
    return result


def _fig2_extra(result: SuiteResult) -> None:
    """The non-periodic profile under the Schroedinger flow loses its regular order."""
    residuals: Dict[str, float] = {}
    for report in result.reports:
        (entry,) = report.summary.values()
        residuals[report.study] = float(entry.get("residual", math.nan))
    smooth = residuals["fig2_schroedinger_smooth"]
    rough = residuals["fig2_schroedinger_identity"]
    result.check(
        "fig2 oscillatory convergence for a non-periodic profile",
        rough > OSCILLATION_RESIDUAL_FACTOR * smooth,
        f"fit residual {rough:.3e} vs smooth {smooth:.3e} on the same step counts",
    )


def _fig5_extra(result: SuiteResult) -> None:
    """A second reference route per r: the reported errors do not hinge on the reference."""
    smallest = {report.study: min(row["error"] for row in report.rows) for report in result.reports}
    for spec in shipped_studies("fig5"):
        setup = discretize(spec.problem.build())
        primary = reference_solution(setup).state.values
        secondary = reference_solution(setup, tol=REFERENCE_AGREEMENT, method="per_mode_quadrature").state.values
        difference = float(np.max(np.abs(primary - secondary)))
        relative = difference / float(np.max(np.abs(primary)))
        result.check(
            f"{spec.name} reference routes agree",
            relative <= REFERENCE_AGREEMENT,
            f"relative {relative:.3e}, {difference / smallest[spec.name]:.1e} of the smallest reported error",
        )


def _fig6_extra(result: SuiteResult) -> None:
    """Both EQRF2 formulations give the same states, and the integral one is cheaper."""
    (report,) = result.reports
    integral, fractional = "EQRF2 G (I)", "EQRF2 G (F)"
    seconds = {(row["method"], row["N"]): row["seconds"] for row in report.rows}
    for N in sorted({row["N"] for row in report.rows}):
        a, b = report.states[(integral, N)], report.states[(fractional, N)]
        difference = float(np.max(np.abs(a.values - b.values))) / float(np.max(np.abs(b.values)))
        result.check(
            f"fig6 formulation agreement N={N}",
            difference <= FORMULATION_AGREEMENT,
            f"relative {difference:.3e} (bound {FORMULATION_AGREEMENT:.0e})",
        )
        fast, slow = seconds[(integral, N)], seconds[(fractional, N)]
        result.check(f"fig6 integral formulation faster N={N}", fast < slow, f"{fast:.4f}s vs {slow:.4f}s")


# properties


def _relative(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), np.finfo(float).tiny)


def phi_recurrence_deviation() -> float:
    """max relative deviation of phi_lam(z) = z phi_{lam+1}(z) + 1/Gamma(1 + lam) on a (lam, z) grid.

    The grid stops at |z| = 1e3. On the negative axis the two sides cancel to about |z| / lam ulps,
    so beyond that the identity measures its own rounding rather than phi_frac.
    """
    orders = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.5)
    left = np.pi * np.array([0.5, 0.75, 1.0])
    right = np.pi * np.array([0.0, 0.25])
    z = np.concatenate(
        [rho * np.exp(1j * left) for rho in (0.3, 3.0, 25.0, 80.0, 1e3)]
        + [rho * np.exp(1j * right) for rho in (0.3, 3.0, 25.0, 80.0)]
    )
    z = np.concatenate([z, np.conj(z)])
    worst = 0.0
    for lam in orders:
        lhs = phi_frac_array(lam, z)
        rhs = z * phi_frac_array(lam + 1.0, z) + 1.0 / gamma(1.0 + lam)
        scale = np.maximum(np.abs(lhs), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    return worst


def phi_oracle_deviation(samples: int = 200, seed: int = 0) -> float:
    """max relative deviation of phi_frac from the quadrature oracle on random (lam, z)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        lam = float(rng.uniform(0.1, 3.0))
        radius = float(10.0 ** rng.uniform(-2.0, 3.0))
        # right half-plane only where e^z stays moderate: |arg z| >= pi/2 beyond radius 20
        half = np.pi if radius <= 20.0 else np.pi / 2
        angle = float(rng.uniform(np.pi - half, np.pi)) * float(rng.choice([-1.0, 1.0]))
        z = radius * complex(math.cos(angle), math.sin(angle))
        value = phi_frac(lam, z)
        # the integrand is bounded by max(1, e^Re z) away from theta = 0
        reference = phi_frac_oracle(lam, z, abs_tol=1e-13 * max(1.0, math.exp(z.real))).value
        worst = max(worst, _relative(value, reference))
    return worst


def kernel_oracle_deviation() -> float:
    """max relative deviation of the kernel weights from direct quadrature."""
    tau = 0.05
    worst = 0.0
    for r in (0.25, 0.5, 0.75):
        for j in (1, 2):
            for t_n in (0.0, 0.1, 1.0):
                for z in (-1.0, -100.0, -1000.0, 10j, 1000j, -200.0 + 400j):
                    value = kernel_weight(1.0 + j * r, t_n, tau, z)
                    reference = kernel_weight_oracle(1.0 + j * r, t_n, tau, z, rel_tol=1e-12)
                    worst = max(worst, _relative(value, reference))
    return worst


def gauss_jacobi_deviation() -> float:
    """max relative error of Gauss-Jacobi rules on the monomials they integrate exactly."""
    worst = 0.0
    for r in (0.25, 0.5, 0.75):
        for n in (2, 4, 8, 16):
            rule = gauss_jacobi(n, r)
            for k in range(2 * n):
                exact = 1.0 / (r + k + 1.0)
                worst = max(worst, abs(float(np.sum(rule.weights * rule.nodes**k)) - exact) / exact)
    return worst


def exactness_deviation() -> float:
    """max relative error of EQRF-nu on sources sum_{j<nu} a_j t^(j r), which it integrates exactly."""
    coefficients = (1.0, -0.5, 0.25, 0.125)
    eigenvalues = ((-1.0, 0.0), (-50.0, 0.0), (0.0, 10.0), (-1000.0, 5.0))
    worst = 0.0
    for r in (0.5, 0.75):
        for nu, family in ((1, "gauss"), (2, "gauss"), (2, "trapezoid"), (3, "gauss_lobatto"), (4, "gauss")):
            problem = BenchmarkProblem(
                operator=OperatorSpec(family="diagonal", size=len(eigenvalues), eigenvalues=eigenvalues),
                source=SourceSpec(kind="polynomial", r=r, coefficients=coefficients[:nu]),
                initial="one",
                T=1.0,
            )
            setup = discretize(problem)
            reference = reference_solution(setup)
            method = Method(EQRFStepper, nodes=node_set(family, nu))
            state = march(setup.initial, setup.op, setup.source, TimeGrid(problem.T, 7), method)
            difference = float(np.max(np.abs(state.values - reference.state.values)))
            worst = max(worst, difference / float(np.max(np.abs(reference.state.values))))
    return worst


def reference_agreement() -> Dict[str, float]:
    """Relative max-norm disagreement between two independent reference routes per problem."""
    cases = {
        "scalar_intro closed_form/fine_march": (preset("scalar_intro"), "fine_march"),
        "per r=1/2 closed_form/fine_march": (preset("per", r=0.5), "fine_march"),
        "perrad r=1/2 phi_series/per_mode_quadrature": (preset("perrad", r=0.5), "per_mode_quadrature"),
        "heat phi_series/per_mode_quadrature": (preset("heat"), "per_mode_quadrature"),
    }
    agreement = {}
    for name, (problem, route) in cases.items():
        setup = discretize(problem)
        primary = reference_solution(setup).state.values
        secondary = reference_solution(setup, tol=1e-10, method=route).state.values
        agreement[name] = float(np.max(np.abs(primary - secondary)) / np.max(np.abs(primary)))
    return agreement


def _props(result: SuiteResult) -> None:
    deviation = phi_recurrence_deviation()
    result.check("phi recurrence", deviation <= 1e-11, f"{deviation:.3e}")
    deviation = phi_oracle_deviation()
    result.check("phi versus integral oracle", deviation <= 1e-11, f"{deviation:.3e}")
    deviation = kernel_oracle_deviation()
    result.check("kernel weight versus quadrature", deviation <= 1e-10, f"{deviation:.3e}")
    deviation = gauss_jacobi_deviation()
    result.check("Gauss-Jacobi monomial exactness", deviation <= 1e-12, f"{deviation:.3e}")

    for family, nu in (("gauss", 2), ("gauss", 3), ("gauss_radau", 2), ("gauss_radau", 3), ("gauss_lobatto", 3)):
        residual = node_set(family, nu).relation_residual
        result.check(f"node relation {family} nu={nu}", abs(residual) <= 1e-13, f"{residual:.3e}")
    residual = node_relation_residual((0.0, 1.0))
    result.check("node relation trapezoid", abs(residual + 1.0 / 6.0) <= 1e-13, f"{residual:.15f}")
    residual = node_relation_residual((0.0, 1.0 / 3.0, 1.0))
    result.check("node relation Newton-Cotes {0, 1/3, 1}", abs(residual) > 1e-3, f"{residual:.6f}")

    deviation = exactness_deviation()
    result.check("EQRF-nu exactness on its interpolation space", deviation <= 1e-11, f"{deviation:.3e}")
    for name, value in reference_agreement().items():
        result.check(f"reference agreement {name}", value <= REFERENCE_AGREEMENT, f"{value:.3e}")


_EXTRA: Dict[str, Callable[[SuiteResult], None]] = {"fig2": _fig2_extra, "fig5": _fig5_extra, "fig6": _fig6_extra}


def run_suite(
    suite: SuiteName,
    out_dir: Optional[Union[str, Path]] = None,
    debug: bool = False,
) -> SuiteResult:
    """Run one acceptance suite; CSV and JSON of figure studies go to `out_dir` when given."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    if suite == "props":
        result = SuiteResult(suite)
        _props(result)
        return result
    path = Path(out_dir) if out_dir is not None else None
    result = _run_figure(suite, path, debug, keep_states=suite == "fig6")
    if suite in _EXTRA:
        _EXTRA[suite](result)
    return result
