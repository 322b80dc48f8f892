"""Benchmark problems, discretization and reference solutions."""

import itertools
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate

from eqrf.exceptions import OperatorError, ReferenceAccuracyError, StudySpecError
from eqrf.operators import FourierOperator, State, SymmetrizedOperator
from eqrf.problems import (
    COEFFICIENTS,
    PRESETS,
    PROFILES,
    SourceSpec,
    discretize,
    parse_problem,
    preset,
    reference_solution,
    terminal_error,
)
from tests.utils import diagonal_problem, relative_error


class TestPresets:
    def test_schroedinger_presets(self):
        for name, T, kind in (("perbc", 3.0, "power"), ("per", 1.0, "power"), ("perrad", 2.0, "exp_power")):
            problem = PRESETS[name]
            assert problem.name == name
            assert problem.T == T
            assert problem.source.kind == kind
            assert problem.operator.family == "periodic"
            assert problem.operator.size == 500
            assert problem.operator.zeta == (0.0, 1.0)
            assert problem.initial == "sin_2pi"

    def test_heat_preset(self):
        problem = PRESETS["heat"]
        assert problem.operator.family == "dirichlet"
        assert problem.operator.size == 1000
        assert problem.operator.coefficient == "heat"
        assert (problem.source.profile, problem.initial) == ("bubble", "bubble4")

    def test_scalar_preset(self):
        problem = PRESETS["scalar_intro"]
        assert problem.operator.eigenvalues == ((-1.0, 0.0),)
        assert problem.source.r == 0.75
        assert problem.T == 0.1

    def test_preset_without_overrides_is_shared(self):
        assert preset("per") is PRESETS["per"]

    def test_overrides(self):
        problem = preset("perbc", zeta=(1.0, 0.0), profile="identity", size=32, r=0.5, T=0.5)
        assert problem.operator.zeta == (1.0, 0.0)
        assert problem.operator.size == 32
        assert problem.source.profile == "identity"
        assert problem.source.r == 0.5
        assert problem.T == 0.5
        assert PRESETS["perbc"].operator.size == 500

    def test_unknown_preset(self):
        with pytest.raises(StudySpecError) as exc_info:
            preset("wave")
        assert "unknown preset" in str(exc_info.value)

    @pytest.mark.parametrize(
        "overrides",
        [{"speed": 2.0}, {"r": 1.5}, {"r": 0.0}, {"size": 7}, {"T": -1.0}, {"profile": "gaussian"}],
        ids=["unknown key", "r too large", "r zero", "odd size", "negative T", "unknown profile"],
    )
    def test_invalid_overrides(self, overrides):
        with pytest.raises(StudySpecError):
            preset("per", **overrides)


class TestValidation:
    def test_models_are_frozen(self):
        with pytest.raises(ValidationError):
            PRESETS["per"].T = 2.0  # type: ignore[misc]

    def test_json_round_trip(self):
        problem = preset("perrad", r=0.25)
        assert parse_problem(problem.model_dump_json()) == problem

    def test_diagonal_needs_matching_eigenvalues(self):
        document = diagonal_problem((-1.0, -2.0)).model_dump()
        document["operator"]["size"] = 3
        with pytest.raises(StudySpecError) as exc_info:
            parse_problem(document)
        assert exc_info.value.errors()

    def test_polynomial_needs_coefficients(self):
        with pytest.raises(ValidationError):
            SourceSpec(kind="polynomial", r=0.5)
        with pytest.raises(ValidationError):
            SourceSpec(kind="power", r=0.5, coefficients=(1.0,))

    def test_infinite_time(self):
        document = PRESETS["scalar_intro"].model_dump()
        document["T"] = math.inf
        with pytest.raises(StudySpecError):
            parse_problem(document)


class TestSources:
    def test_scalar_functions(self):
        assert SourceSpec(kind="power", r=0.5).scalar()(0.3) == 0.3
        assert SourceSpec(kind="exp_power", r=0.5).scalar()(1.0) == pytest.approx(math.e)
        assert SourceSpec(kind="polynomial", r=0.5, coefficients=(1.0, 2.0, 3.0)).scalar()(2.0) == pytest.approx(17.0)

    def test_series(self):
        assert list(SourceSpec(kind="power", r=0.5).series()) == [0.0, 1.0]
        head = list(itertools.islice(SourceSpec(kind="exp_power", r=0.5).series(), 4))
        assert head == pytest.approx([1.0, 1.0, 0.5, 1.0 / 6.0])
        assert not SourceSpec(kind="exp_power", r=0.5).finite_series


def test_profiles_and_coefficients():
    x = np.array([0.0, 0.25, 0.5])
    assert PROFILES["inv_2_plus_cos"](x) == pytest.approx([1.0 / 3.0, 0.5, 1.0])
    assert PROFILES["bubble4"](x) == pytest.approx([0.0, 0.75, 1.0])
    assert COEFFICIENTS["heat"](np.array([1.0])) == pytest.approx([0.2])


def test_discretize_small_heat():
    setup = discretize(preset("heat", size=9))
    assert isinstance(setup.op, SymmetrizedOperator)
    assert setup.grid_points == pytest.approx(np.arange(1, 10) / 10)
    assert setup.initial.values == pytest.approx(4.0 * setup.grid_points * (1.0 - setup.grid_points))
    assert setup.source.r == 0.75
    assert setup.source.scalar(1.0) == pytest.approx(math.e)


def test_discretize_periodic():
    setup = discretize(preset("per", size=8))
    assert isinstance(setup.op, FourierOperator)
    assert setup.grid_points == pytest.approx(np.arange(8) / 8)
    assert setup.op.zeta == 1j


class TestReferenceSolution:
    def test_scalar_closed_form(self):
        """y(T) = e^-T + int_0^T e^-(T - s) s^(3/4) ds for y' = -y + t^(3/4)."""
        reference = reference_solution(preset("scalar_intro"))
        forced, _ = integrate.quad(lambda s: math.exp(-(0.1 - s)) * s**0.75, 0.0, 0.1, epsabs=1e-16, epsrel=1e-14)
        assert reference.method == "closed_form"
        assert reference.state.values[0] == pytest.approx(math.exp(-0.1) + forced, rel=1e-13)
        assert reference.state.time == 0.1
        assert reference.accuracy <= 1e-14

    def test_exponential_source_uses_series(self):
        reference = reference_solution(diagonal_problem((-3.0,), r=0.5).with_overrides(source_kind="exp_power"))
        forced, _ = integrate.quad(lambda s: math.exp(-3.0 * (0.1 - s) + s**0.5), 0.0, 0.1, epsabs=1e-16, epsrel=1e-14)
        assert reference.method == "phi_series"
        assert reference.state.values[0] == pytest.approx(math.exp(-0.3) + forced, rel=1e-12)

    @pytest.mark.parametrize(
        "problem",
        [preset("per", size=16, r=0.5), preset("perrad", size=16, T=0.5), preset("heat", size=20)],
        ids=["per", "perrad", "heat"],
    )
    def test_series_and_per_mode_quadrature_agree(self, problem):
        setup = discretize(problem)
        primary = reference_solution(setup)
        secondary = reference_solution(setup, tol=1e-10, method="per_mode_quadrature")
        assert secondary.method == "per_mode_quadrature"
        assert relative_error(secondary.state.values, primary.state.values) <= 1e-10

    @pytest.mark.parametrize("r", [0.25, 0.75])
    def test_radical_source_routes_agree_at_full_time(self, r):
        """exp(t^r) sources over the whole interval: the series reference matches per-mode quadrature."""
        setup = discretize(preset("perrad", size=16, r=r))
        primary = reference_solution(setup)
        secondary = reference_solution(setup, tol=1e-10, method="per_mode_quadrature")
        assert primary.method == "phi_series"
        assert relative_error(secondary.state.values, primary.state.values) <= 1e-10

    def test_fine_march_is_exact_for_power_sources(self):
        setup = discretize(preset("per", size=16))
        primary = reference_solution(setup)
        marched = reference_solution(setup, tol=1e-10, method="fine_march", fine_steps=64)
        assert relative_error(marched.state.values, primary.state.values) <= 1e-10

    def test_accuracy_error(self):
        with pytest.raises(ReferenceAccuracyError) as exc_info:
            reference_solution(preset("scalar_intro"), tol=1e-30)
        assert exc_info.value.method == "closed_form"

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            reference_solution(preset("scalar_intro"), method="shooting")  # type: ignore[arg-type]


def test_terminal_error():
    reference = State(np.array([1.0, 2.0, 3.0], dtype=complex), time=1.0)
    assert terminal_error(State(np.array([1.0, 2.5, 2.0], dtype=complex)), reference) == 1.0
    with pytest.raises(OperatorError):
        terminal_error(State(np.ones(2, dtype=complex)), reference)
