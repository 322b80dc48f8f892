"""
Classical and fractional phi functions for complex arguments.

The fractional phi function of order lam > 0 is the Mittag-Leffler function
E_{1,1+lam}:

    phi_lam(z) = sum_k z^k / Gamma(1 + lam + k)
               = 1/Gamma(lam) * int_0^1 exp((1 - theta) z) theta^(lam - 1) dtheta

Integer orders reproduce the classical phi_l of exponential integrators.

Evaluation is split in three branches by |z|:

    |z| <= 1        Taylor series, compensated summation
    1 < |z| <= 40   fixed Gauss-Jacobi rule (weight theta^(lam-1)) on the integral
    |z| > 40        z^-lam e^z - sum_k z^-k / Gamma(1 + lam - k), truncated at the
                    smallest term (terminates for integer lam)

Every function is pure; the only cache is the read-only quadrature rule cache.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import rgamma

from eqrf.exceptions import OscillationError, PhiAccuracyError, PhiDomainError
from eqrf.quadrule import power_weight_rule
from eqrf.types import ArrayLike, ComplexArray, PhiMethod

EPS = float(np.finfo(float).eps)

SERIES_RADIUS = 1.0
ASYMPTOTIC_RADIUS = 40.0
INTEGRAL_NODES = 48
MAX_SERIES_TERMS = 200
MAX_ASYMPTOTIC_TERMS = 60
ACCURACY_LIMIT = 1e-10

ORACLE_MAX_ABS_Z = 1e4
ORACLE_NODES = 16
ORACLE_PHASE_PER_PANEL = 8.0
ORACLE_NOISE = 8.0 * EPS
ORACLE_MAX_PANELS = 200_000

_BRANCHES: Tuple[PhiMethod, ...] = ("taylor_series", "gauss_jacobi_integral", "asymptotic_plus_exponential")


@dataclass(frozen=True)
class PhiOrder:
    """Order lam of phi_lam; must be positive and finite."""

    lam: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.lam) or self.lam <= 0.0:
            raise PhiDomainError(f"phi order must be positive and finite, got {self.lam}")


@dataclass(frozen=True)
class EvalReport:
    value: complex
    method_used: PhiMethod
    est_rel_error: float


OrderLike = Union[PhiOrder, float, int]


def _lam(order: OrderLike) -> float:
    if isinstance(order, PhiOrder):
        return order.lam
    return PhiOrder(float(order)).lam


def _as_complex_array(z: ArrayLike) -> ComplexArray:
    values = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(values)):
        raise PhiDomainError("phi argument must be finite")
    return values


def gamma_real(x: float) -> float:
    """Euler's Gamma function for x > 0."""
    if not math.isfinite(x):
        raise PhiDomainError(f"Gamma argument must be finite, got {x}")
    if x <= 0.0:
        if float(x).is_integer():
            raise PhiDomainError(f"Gamma has a pole at {x}")
        raise PhiDomainError(f"Gamma argument must be positive, got {x}")
    return float(_gamma(x))


def _taylor(lam: float, z: ComplexArray) -> Tuple[ComplexArray, np.ndarray]:
    term = np.full(z.shape, rgamma(1.0 + lam), dtype=np.complex128)
    total = term.copy()
    carry = np.zeros_like(total)
    magnitude = np.abs(term)
    for k in range(MAX_SERIES_TERMS):
        term = term * z / (1.0 + lam + k)
        # Kahan summation
        y = term - carry
        t = total + y
        carry = (t - total) - y
        total = t
        magnitude += np.abs(term)
        if np.all(np.abs(term) <= EPS * np.abs(total)):
            break
    est = 4.0 * EPS * magnitude / np.maximum(np.abs(total), np.finfo(float).tiny)
    return total, est


def _integral(lam: float, z: ComplexArray) -> Tuple[ComplexArray, np.ndarray]:
    rule = power_weight_rule(INTEGRAL_NODES, lam - 1.0)
    samples = np.exp(np.multiply.outer(z, 1.0 - rule.nodes))
    scale = rgamma(lam)
    values = scale * (samples @ rule.weights)
    magnitude = abs(scale) * (np.abs(samples) @ rule.weights)
    est = 8.0 * EPS * magnitude / np.maximum(np.abs(values), np.finfo(float).tiny)
    return values, est


def algebraic_tail(order: OrderLike, z: ArrayLike) -> Tuple[ComplexArray, np.ndarray]:
    """
    The algebraic part sum_{k>=1} z^-k / Gamma(1 + lam - k) of the large-|z|
    expansion, truncated at the smallest term.

    Returns the tail and the magnitude of the first omitted term.
    """
    lam = _lam(order)
    zz = _as_complex_array(z)
    inv = 1.0 / zz
    power = np.ones_like(zz)
    tail = np.zeros_like(zz)
    active = np.ones(zz.shape, dtype=bool)
    previous = np.full(zz.shape, np.inf)
    omitted = np.zeros(zz.shape)
    for k in range(1, MAX_ASYMPTOTIC_TERMS + int(math.ceil(lam)) + 1):
        power = power * inv
        coefficient = float(rgamma(1.0 + lam - k))
        if coefficient == 0.0 and float(lam).is_integer() and k > lam:
            # 1/Gamma vanishes at the poles: the expansion terminates
            omitted[active] = 0.0
            active[:] = False
            break
        term = coefficient * power
        size = np.abs(term)
        growing = active & (size > previous) & (k > lam)
        omitted[growing] = size[growing]
        active &= ~growing
        tail[active] -= term[active]
        previous = np.where(active, size, previous)
        converged = active & (size <= EPS * np.abs(tail))
        omitted[converged] = size[converged]
        active &= ~converged
        if not np.any(active):
            break
    omitted[active] = previous[active]
    return tail, omitted


def _asymptotic(lam: float, z: ComplexArray) -> Tuple[ComplexArray, np.ndarray]:
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        exponential = np.power(z, -lam) * np.exp(z)
    exponential = np.where(np.isnan(exponential) & (z.real < 0), 0.0, exponential)
    tail, omitted = algebraic_tail(lam, z)
    values = exponential + tail
    scale = np.maximum(np.abs(values), np.finfo(float).tiny)
    est = (omitted + 4.0 * EPS * (np.abs(exponential) + np.abs(tail))) / scale
    return values, est


def _evaluate(lam: float, z: ComplexArray) -> Tuple[ComplexArray, np.ndarray, np.ndarray]:
    """Vectorized evaluation; returns values, error estimates and branch indices."""
    radius = np.abs(z)
    branch = np.where(radius <= SERIES_RADIUS, 0, np.where(radius <= ASYMPTOTIC_RADIUS, 1, 2))
    values = np.empty(z.shape, dtype=np.complex128)
    est = np.empty(z.shape)
    for index, kernel in enumerate((_taylor, _integral, _asymptotic)):
        mask = branch == index
        if np.any(mask):
            values[mask], est[mask] = kernel(lam, z[mask])
    return values, est, branch


def _check_accuracy(values: ComplexArray, est: np.ndarray) -> None:
    bad = ~np.isfinite(values) | (est > ACCURACY_LIMIT)
    if np.any(bad):
        worst = int(np.argmax(np.where(bad, np.nan_to_num(est, nan=np.inf), -1.0)))
        raise PhiAccuracyError(complex(values.flat[worst]), float(est.flat[worst]))


def phi_frac_array(order: OrderLike, z: ArrayLike) -> ComplexArray:
    """phi_lam evaluated elementwise on an array of complex arguments."""
    lam = _lam(order)
    zz = _as_complex_array(z)
    flat = zz.reshape(-1)
    values, est, _ = _evaluate(lam, flat)
    _check_accuracy(values, est)
    return values.reshape(zz.shape)


def phi_frac_report(order: OrderLike, z: complex) -> EvalReport:
    """Evaluate phi_lam(z) and report the branch used and its error estimate."""
    lam = _lam(order)
    zz = _as_complex_array([z])
    values, est, branch = _evaluate(lam, zz)
    _check_accuracy(values, est)
    return EvalReport(value=complex(values[0]), method_used=_BRANCHES[int(branch[0])], est_rel_error=float(est[0]))


def phi_frac(order: OrderLike, z: complex) -> complex:
    """Fractional phi function phi_lam(z) = E_{1,1+lam}(z)."""
    return phi_frac_report(order, z).value


def phi_classical_array(ell: int, z: ArrayLike) -> ComplexArray:
    """
    Classical phi_l elementwise: Taylor series for |z| <= max(1, l), upward
    recurrence phi_j = (phi_{j-1} - 1/(j-1)!) / z from exp otherwise.
    """
    if ell < 0 or int(ell) != ell:
        raise PhiDomainError(f"classical phi index must be a nonnegative integer, got {ell}")
    ell = int(ell)
    zz = _as_complex_array(z)
    if ell == 0:
        return np.exp(zz)

    flat = zz.reshape(-1)
    values = np.empty(flat.shape, dtype=np.complex128)
    small = np.abs(flat) <= max(1.0, float(ell))

    if np.any(small):
        zs = flat[small]
        term = np.full(zs.shape, 1.0 / math.factorial(ell), dtype=np.complex128)
        total = term.copy()
        carry = np.zeros_like(total)
        for k in range(MAX_SERIES_TERMS):
            term = term * zs / (ell + k + 1)
            y = term - carry
            t = total + y
            carry = (t - total) - y
            total = t
            if np.all(np.abs(term) <= EPS * np.abs(total)):
                break
        values[small] = total

    if np.any(~small):
        zl = flat[~small]
        with np.errstate(over="ignore"):
            current = np.exp(zl)
        for j in range(1, ell + 1):
            current = (current - 1.0 / math.factorial(j - 1)) / zl
        values[~small] = current

    return values.reshape(zz.shape)


def phi_classical(ell: int, z: complex) -> complex:
    """Classical phi_l(z); phi_0 is the exponential."""
    return complex(phi_classical_array(ell, [z])[0])


def phi_frac_oracle(order: OrderLike, z: complex, abs_tol: float) -> EvalReport:
    """
    Reference value of phi_lam(z) by panel-adaptive quadrature of its integral
    representation.

    The panel touching theta = 0 uses a Gauss-Jacobi rule that absorbs the
    theta^(lam-1) factor; the others use Gauss-Legendre. The starting panels
    span at most ORACLE_PHASE_PER_PANEL radians of exp((1 - theta) z). A panel
    is accepted when its 16- and 32-point estimates agree to its share of
    `abs_tol`, or to the rounding of its samples: an argument known to eps
    carries a phase error of about eps |z|.
    """
    lam = _lam(order)
    zc = complex(z)
    if not (math.isfinite(zc.real) and math.isfinite(zc.imag)):
        raise PhiDomainError("phi argument must be finite")
    if abs(zc) > ORACLE_MAX_ABS_Z:
        raise OscillationError(f"|z| = {abs(zc):.3e} exceeds the oracle range {ORACLE_MAX_ABS_Z:.0e}")
    if not abs_tol > 0.0:
        raise PhiDomainError(f"oracle tolerance must be positive, got {abs_tol}")

    def estimate(a: float, b: float, n: int) -> Tuple[complex, float]:
        if a == 0.0:
            rule = power_weight_rule(n, lam - 1.0)
            terms = b**lam * rule.weights * np.exp((1.0 - b * rule.nodes) * zc)
        else:
            rule = power_weight_rule(n, 0.0)
            theta = a + (b - a) * rule.nodes
            terms = (b - a) * rule.weights * np.exp((1.0 - theta) * zc) * theta ** (lam - 1.0)
        return complex(np.sum(terms)), float(np.sum(np.abs(terms)))

    noise = ORACLE_NOISE * (1.0 + abs(zc))
    first = int(abs(zc) / ORACLE_PHASE_PER_PANEL) + 1
    edges = np.linspace(0.0, 1.0, first + 1)
    stack = [(float(edges[i]), float(edges[i + 1])) for i in range(first)]
    real_parts = []
    imag_parts = []
    error = 0.0
    panels = 0
    while stack:
        a, b = stack.pop()
        panels += 1
        if panels > ORACLE_MAX_PANELS:
            partial = complex(math.fsum(real_parts), math.fsum(imag_parts))
            raise PhiAccuracyError(partial, math.inf, "oracle panel budget")
        coarse, _ = estimate(a, b, ORACLE_NODES)
        fine, magnitude = estimate(a, b, 2 * ORACLE_NODES)
        difference = abs(fine - coarse)
        if difference <= abs_tol * (b - a) + noise * magnitude or b - a < 1e-15:
            real_parts.append(fine.real)
            imag_parts.append(fine.imag)
            error += difference
        else:
            middle = 0.5 * (a + b)
            stack.append((a, middle))
            stack.append((middle, b))

    scale = float(rgamma(lam))
    value = scale * complex(math.fsum(real_parts), math.fsum(imag_parts))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise PhiAccuracyError(value, math.inf, "oracle produced a non-finite value")
    absolute = abs(scale) * error
    est = absolute / abs(value) if value != 0 else absolute
    return EvalReport(value=value, method_used="integral_oracle", est_rel_error=est)
