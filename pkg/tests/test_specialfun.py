"""Fractional and classical phi functions."""

import math

import numpy as np
import pytest

from eqrf.acceptance import phi_recurrence_deviation
from eqrf.exceptions import OscillationError, PhiAccuracyError, PhiDomainError
from eqrf.specialfun import (
    PhiOrder,
    _asymptotic,
    _integral,
    algebraic_tail,
    gamma_real,
    phi_classical,
    phi_classical_array,
    phi_frac,
    phi_frac_array,
    phi_frac_oracle,
    phi_frac_report,
)


def test_phi_one_at_one():
    """phi_1(1) = e - 1."""
    assert phi_frac(1.0, 1.0) == pytest.approx(1.718281828459045, rel=1e-14)


def test_phi_at_zero_is_reciprocal_gamma():
    """phi_lam(0) = 1/Gamma(1 + lam)."""
    assert phi_frac(0.5, 0.0) == pytest.approx(1.128379167095513, rel=1e-14)
    assert phi_frac(PhiOrder(2.5), 0.0) == pytest.approx(1.0 / math.gamma(3.5), rel=1e-14)


@pytest.mark.parametrize(
    "z, method",
    [
        (0.5 + 0.5j, "taylor_series"),
        (-10.0, "gauss_jacobi_integral"),
        (30j, "gauss_jacobi_integral"),
        (-100.0, "asymptotic_plus_exponential"),
        (1e4j, "asymptotic_plus_exponential"),
    ],
)
def test_branch_selection(z, method):
    """The branch follows |z|: series, integral, asymptotic."""
    report = phi_frac_report(0.75, z)
    assert report.method_used == method
    assert report.est_rel_error < 1e-12


@pytest.mark.parametrize("ell", [1, 2, 3])
@pytest.mark.parametrize("z", [0.3, -0.7j, -10.0, 5.0 + 20j, -45.0, 100j, -2000.0])
def test_integer_orders_match_classical_phi(ell, z):
    """phi_l for integer l agrees with the classical exponential-integrator phi functions."""
    assert abs(phi_frac(ell, z) - phi_classical(ell, z)) <= 1e-12 * abs(phi_classical(ell, z))


def test_classical_phi_closed_forms():
    """phi_0 = exp, phi_1 = (e^z - 1)/z, phi_2 = (e^z - 1 - z)/z^2."""
    z = np.array([-3.0, 2j, 7.0 - 1j])
    assert np.allclose(phi_classical_array(0, z), np.exp(z), rtol=1e-15)
    assert np.allclose(phi_classical_array(1, z), (np.exp(z) - 1) / z, rtol=1e-13)
    assert np.allclose(phi_classical_array(2, z), (np.exp(z) - 1 - z) / z**2, rtol=1e-12)
    series = math.fsum(1e-3**k / math.factorial(k + 2) for k in range(8))
    assert phi_classical(2, 1e-3) == pytest.approx(series, rel=1e-15)


def test_array_evaluation_matches_scalar():
    """The vectorized evaluator returns the scalar values elementwise, across branches."""
    z = np.array([[0.1, -5.0], [35j, -400.0 + 3j]])
    values = phi_frac_array(1.25, z)
    assert values.shape == z.shape
    for index in np.ndindex(z.shape):
        assert values[index] == pytest.approx(phi_frac(1.25, complex(z[index])), rel=1e-14)


@pytest.mark.parametrize("lam", [0.25, 0.75, 1.5, 2.25])
def test_recurrence(lam):
    """phi_lam(z) = z phi_{lam+1}(z) + 1/Gamma(1 + lam)."""
    z = np.array([0.5j, -3.0, 12.0 + 12j, -39.0, 41j, -300.0, 5000j])
    lhs = phi_frac_array(lam, z)
    rhs = z * phi_frac_array(lam + 1.0, z) + 1.0 / math.gamma(1.0 + lam)
    assert np.all(np.abs(lhs - rhs) <= 1e-11 * np.abs(lhs))


def test_recurrence_on_the_negative_axis():
    """The property check's range: cancellation stays below 1e-11 up to |z| = 1e3."""
    z = -np.geomspace(40.0, 1e3, 9).astype(complex)
    for lam in (0.25, 0.5, 1.75):
        lhs = phi_frac_array(lam, z)
        rhs = z * phi_frac_array(lam + 1.0, z) + 1.0 / math.gamma(1.0 + lam)
        assert np.all(np.abs(lhs - rhs) <= 1e-11 * np.abs(lhs))
    assert phi_recurrence_deviation() <= 1e-11


@pytest.mark.parametrize("lam, z", [(1.75, -50.0), (0.5, 25j), (2.5, -8.0 + 3j), (0.3, 3.0)])
def test_agrees_with_integral_oracle(lam, z):
    """Production evaluator against adaptive quadrature of the integral representation."""
    oracle = phi_frac_oracle(lam, z, abs_tol=1e-13 * max(1.0, math.exp(complex(z).real)))
    assert oracle.method_used == "integral_oracle"
    assert abs(phi_frac(lam, z) - oracle.value) <= 1e-11 * abs(oracle.value)


@pytest.mark.parametrize("lam, z", [(0.3, 1000j), (2.5, -700.0 + 700j), (0.1, -1000.0)])
def test_oracle_resolves_large_arguments(lam, z):
    """Rounding of the phase, about eps |z|, does not stall the panel refinement."""
    oracle = phi_frac_oracle(lam, z, abs_tol=1e-13)
    assert abs(phi_frac(lam, z) - oracle.value) <= 1e-11 * abs(oracle.value)


def test_oracle_refuses_large_arguments():
    with pytest.raises(OscillationError):
        phi_frac_oracle(0.5, 2e4j, abs_tol=1e-12)


def test_algebraic_tail_terminates_for_integer_order():
    """For lam = 1 the tail is exactly -1/z."""
    tail, omitted = algebraic_tail(1, np.array([50.0, -80j]))
    assert np.allclose(tail, [-1 / 50.0, -1 / -80j], rtol=1e-15)
    assert np.all(omitted == 0.0)


def test_asymptotic_form_on_the_imaginary_axis():
    """phi_lam(z) = z^-lam e^z + tail: the exponential part is kept for purely imaginary z."""
    z = 200j
    tail, _ = algebraic_tail(0.5, np.array([z]))
    expected = z**-0.5 * np.exp(z) + tail[0]
    assert phi_frac(0.5, z) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("order", [0.0, -1.0, math.inf, math.nan])
def test_invalid_order(order):
    with pytest.raises(PhiDomainError):
        phi_frac(order, 1.0)


def test_invalid_argument():
    with pytest.raises(PhiDomainError):
        phi_frac(0.5, complex(math.nan, 0.0))
    with pytest.raises(PhiDomainError):
        phi_classical(-1, 1.0)


class TestGammaReal:
    def test_values(self):
        assert gamma_real(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
        assert gamma_real(1.75) == pytest.approx(math.gamma(1.75), rel=1e-15)

    @pytest.mark.parametrize("x", [0.0, -2.0, -0.5, math.inf])
    def test_domain(self, x):
        with pytest.raises(PhiDomainError):
            gamma_real(x)


def test_accuracy_error_carries_value():
    """PhiAccuracyError exposes the value and the estimate."""
    exc = PhiAccuracyError(1.5 + 0j, 1e-3)
    assert exc.value == 1.5
    assert exc.est_rel_error == 1e-3
    assert "1.000e-03" in str(exc)
    assert repr(exc) == "PhiAccuracyError(value=(1.5+0j), est_rel_error=0.001)"


@pytest.mark.parametrize("lam", [0.25, 0.5, 1.75, 2.5])
def test_branches_agree_on_the_crossover_annulus(lam):
    """Gauss-Jacobi integral and asymptotic expansion agree to 12 digits for 30 <= |z| <= 60.

    On the negative real axis the truncated expansion cannot beat its smallest
    term, about sin(pi lam) |z|^(1 - lam) Gamma(lam) e^-|z| relative, so there the
    comparison starts at |z| = 33.
    """
    radii = np.linspace(30.0, 60.0, 7)
    rays = np.exp(1j * np.pi * np.array([0.0, 0.25, 0.5, 0.75]))
    z = np.concatenate([np.outer(radii, rays).ravel(), -np.linspace(33.0, 60.0, 7) + 0j])
    z = np.concatenate([z, np.conj(z)])
    by_integral, _ = _integral(lam, z)
    by_expansion, _ = _asymptotic(lam, z)
    assert np.max(np.abs(by_integral - by_expansion) / np.abs(by_integral)) <= 1e-12


@pytest.mark.parametrize("lam", [0.25, 0.5, 1.0, 1.75, 3.5])
def test_bounded_on_the_negative_axis(lam):
    """0 < phi_lam(-x) <= phi_lam(0) = 1/Gamma(1 + lam) for every x >= 0."""
    x = np.concatenate([[0.0], np.geomspace(1e-3, 1e8, 45)])
    values = phi_frac_array(lam, -x)
    assert np.all(values.real > 0.0)
    assert np.all(np.abs(values) <= (1.0 + 1e-14) / math.gamma(1.0 + lam))


def test_stored_value_on_the_negative_axis():
    """phi_{7/4}(-50), summed from the convergent part of its expansion."""
    expected = 0.021433210599832549
    assert phi_frac(1.75, -50.0) == pytest.approx(expected, rel=1e-13)
    oracle = phi_frac_oracle(1.75, -50.0, abs_tol=1e-15)
    assert oracle.value == pytest.approx(expected, rel=1e-12)
