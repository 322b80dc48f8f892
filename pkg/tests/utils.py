"""Test utilities and helper functions."""

from typing import Sequence, Tuple

import numpy as np

from eqrf.problems import BenchmarkProblem, OperatorSpec, SourceSpec


def diagonal_problem(
    eigenvalues: Sequence[complex] = (-1.0,),
    *,
    r: float = 0.75,
    T: float = 0.1,
    coefficients: Tuple[float, ...] = (),
) -> BenchmarkProblem:
    """Decoupled scalar equations y_k' = lambda_k y_k + h(t^r), y_k(0) = 1.

    h(x) = x unless polynomial `coefficients` are given.
    """
    pairs = tuple((complex(lam).real, complex(lam).imag) for lam in eigenvalues)
    source = (
        SourceSpec(kind="polynomial", r=r, coefficients=coefficients)
        if coefficients
        else SourceSpec(kind="power", r=r)
    )
    return BenchmarkProblem(
        operator=OperatorSpec(family="diagonal", size=len(pairs), eigenvalues=pairs),
        source=source,
        initial="one",
        T=T,
    )


def relative_error(value, reference) -> float:
    """Max-norm relative difference."""
    value, reference = np.asarray(value), np.asarray(reference)
    return float(np.max(np.abs(value - reference)) / np.max(np.abs(reference)))
