"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from eqrf.integrators import FractionalSource
from eqrf.operators import (
    DiagonalizableOperator,
    State,
    dirichlet_fd_variable_coefficient,
    periodic_spectral_second_derivative,
)
from eqrf.problems import COEFFICIENTS, PROFILES


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def periodic_heat() -> DiagonalizableOperator:
    """d_xx on 16 periodic modes."""
    return periodic_spectral_second_derivative(16, 1.0)


@pytest.fixture
def dirichlet_heat() -> DiagonalizableOperator:
    """(1 + x^2)/10 d_xx on 24 inner points."""
    return dirichlet_fd_variable_coefficient(24, COEFFICIENTS["heat"])


def make_source(op: DiagonalizableOperator, r: float = 0.75, h=lambda x: x, profile: str = "inv_2_plus_cos"):
    values = np.asarray(PROFILES[profile](op.sample_grid), dtype=np.complex128)
    return FractionalSource(r=r, h=h, profile=values)


def make_state(op: DiagonalizableOperator, profile: str = "sin_2pi") -> State:
    return State(values=np.asarray(PROFILES[profile](op.sample_grid), dtype=np.complex128))
