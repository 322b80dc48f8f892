"""
Stiff linear operators exposed through a diagonalizing similarity.

Every matrix function the integrators need is evaluated "in a scalar
fashion": transform to modal coordinates, multiply by f(t * Lambda), and
transform back. Three backends:

    FourierOperator       zeta * d_xx, periodic on (0, 1), pseudospectral (DFT pair)
    SymmetrizedOperator   a(x) * d_xx, homogeneous Dirichlet, second-order finite
                          differences; A = (D V) Lambda (V^T D^-1), D = diag(a^(1/2))
    DiagonalOperator      already-diagonal systems (scalar test equations)
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.fft
from scipy.linalg import LinAlgError, eigh_tridiagonal

from eqrf.exceptions import OperatorError, PhiDomainError
from eqrf.specialfun import PhiOrder, phi_classical_array, phi_frac_array
from eqrf.types import ArrayLike, CoefficientFunction, ComplexArray, OperatorKind, RealArray


@dataclass(frozen=True)
class State:
    """Solution vector at one time level."""

    values: ComplexArray
    time: float = 0.0

    @property
    def dim(self) -> int:
        return int(self.values.size)


class DiagonalizableOperator:
    """
    Base class: an operator A = T Lambda T^-1 with T^-1 = to_modal, T = from_modal.
    """

    kind: OperatorKind

    def __init__(self, eigenvalues: ArrayLike, grid: RealArray):
        self.eigenvalues: ComplexArray = np.asarray(eigenvalues, dtype=np.complex128)
        self.eigenvalues.setflags(write=False)
        self.grid = np.asarray(grid, dtype=float)
        self.grid.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def sample_grid(self) -> RealArray:
        """Points the source and initial profiles are sampled on."""
        return self.grid

    def to_modal(self, v: ArrayLike) -> ComplexArray:
        raise NotImplementedError()  # pragma: no cover

    def from_modal(self, w: ArrayLike) -> ComplexArray:
        raise NotImplementedError()  # pragma: no cover

    def apply(self, v: ArrayLike) -> ComplexArray:
        """A v through the diagonalization."""
        return self.from_modal(self.eigenvalues * self.to_modal(v))

    def stencil_apply(self, v: ArrayLike) -> ComplexArray:
        """A v from the defining discretization, independent of the diagonalization."""
        raise NotImplementedError()  # pragma: no cover

    def dense_matrix(self) -> ComplexArray:
        """Dense matrix of the defining discretization (small sizes only)."""
        identity = np.eye(self.dim, dtype=np.complex128)
        return np.column_stack([self.stencil_apply(identity[:, j]) for j in range(self.dim)])

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(dim={self.dim}, kind={self.kind!r})"


class FourierOperator(DiagonalizableOperator):
    """zeta * d_xx on (0, 1) with periodic boundary conditions, Fourier pseudospectral."""

    kind: OperatorKind = "fourier_diagonal"

    def __init__(self, n_modes: int, zeta: complex):
        if n_modes < 2 or n_modes % 2:
            raise OperatorError(f"n_modes must be an even integer >= 2, got {n_modes}")
        self.zeta = complex(zeta)
        # k in {0, ..., n/2 - 1, -n/2, ..., -1}: the DFT ordering
        self.wavenumbers = scipy.fft.fftfreq(n_modes, d=1.0 / n_modes)
        eigenvalues = -self.zeta * (2.0 * np.pi * self.wavenumbers) ** 2
        super().__init__(eigenvalues, np.arange(n_modes) / n_modes)

    def to_modal(self, v: ArrayLike) -> ComplexArray:
        return scipy.fft.fft(np.asarray(v, dtype=np.complex128), axis=0)

    def from_modal(self, w: ArrayLike) -> ComplexArray:
        return scipy.fft.ifft(np.asarray(w, dtype=np.complex128), axis=0)

    def stencil_apply(self, v: ArrayLike) -> ComplexArray:
        # pseudospectral: the symbol is the definition
        symbol = -self.zeta * (2.0 * np.pi * self.wavenumbers) ** 2
        return scipy.fft.ifft(symbol * scipy.fft.fft(np.asarray(v, dtype=np.complex128)))


class SymmetrizedOperator(DiagonalizableOperator):
    """a(x) * d_xx on (0, 1), homogeneous Dirichlet, centered finite differences."""

    kind: OperatorKind = "symmetric_eig"

    def __init__(self, n_inner: int, coefficient: CoefficientFunction):
        if n_inner < 1:
            raise OperatorError(f"n_inner must be positive, got {n_inner}")
        grid = np.arange(1, n_inner + 1) / (n_inner + 1)
        samples = np.asarray(coefficient(grid), dtype=float) * np.ones_like(grid)
        if not np.all(np.isfinite(samples)) or np.any(samples <= 0.0):
            raise OperatorError("coefficient a(x) must be positive and finite on the grid")
        self.coefficient = samples
        self.inv_dx2 = float((n_inner + 1) ** 2)

        # D^-1 A D with D = diag(a^(1/2)) is symmetric tridiagonal
        diagonal = -2.0 * samples * self.inv_dx2
        off_diagonal = np.sqrt(samples[:-1] * samples[1:]) * self.inv_dx2
        try:
            if n_inner == 1:
                eigenvalues, vectors = diagonal.copy(), np.ones((1, 1))
            else:
                eigenvalues, vectors = eigh_tridiagonal(diagonal, off_diagonal)
        except LinAlgError as exc:  # pragma: no cover
            raise OperatorError(f"symmetric eigensolver failed: {exc}") from exc
        self.vectors: RealArray = vectors
        self.scaling = np.sqrt(samples)
        super().__init__(eigenvalues, grid)

    def to_modal(self, v: ArrayLike) -> ComplexArray:
        vv = np.asarray(v, dtype=np.complex128)
        return self.vectors.T @ (vv / self.scaling)

    def from_modal(self, w: ArrayLike) -> ComplexArray:
        ww = np.asarray(w, dtype=np.complex128)
        return self.scaling * (self.vectors @ ww)

    def stencil_apply(self, v: ArrayLike) -> ComplexArray:
        vv = np.asarray(v, dtype=np.complex128)
        padded = np.concatenate([[0.0], vv, [0.0]])
        return self.coefficient * (padded[:-2] - 2.0 * padded[1:-1] + padded[2:]) * self.inv_dx2


class DiagonalOperator(DiagonalizableOperator):
    """An operator that is already diagonal; modal and physical coordinates coincide."""

    kind: OperatorKind = "diagonal"

    def __init__(self, eigenvalues: ArrayLike):
        values = np.atleast_1d(np.asarray(eigenvalues, dtype=np.complex128))
        if values.size == 0 or not np.all(np.isfinite(values)):
            raise OperatorError("diagonal operator needs finite eigenvalues")
        super().__init__(values, np.zeros(values.size))

    def to_modal(self, v: ArrayLike) -> ComplexArray:
        return np.array(v, dtype=np.complex128)

    def from_modal(self, w: ArrayLike) -> ComplexArray:
        return np.array(w, dtype=np.complex128)

    def stencil_apply(self, v: ArrayLike) -> ComplexArray:
        return self.eigenvalues * np.asarray(v, dtype=np.complex128)


def periodic_spectral_second_derivative(n_modes: int, zeta: complex) -> FourierOperator:
    """zeta * d_xx with periodic boundary conditions on n_modes grid points x_j = j/n."""
    return FourierOperator(n_modes, zeta)


def dirichlet_fd_variable_coefficient(n_inner: int, a: CoefficientFunction) -> SymmetrizedOperator:
    """a(x) * d_xx with homogeneous Dirichlet conditions on x_i = i/(n+1), i = 1..n."""
    return SymmetrizedOperator(n_inner, a)


def diagonal_operator(eigenvalues: ArrayLike) -> DiagonalOperator:
    return DiagonalOperator(eigenvalues)


def modal_phi(op: DiagonalizableOperator, order: Union[PhiOrder, float, int], t: float) -> ComplexArray:
    """phi_lam(t * Lambda) on the spectrum; order 0 is the exponential."""
    if t < 0.0:
        raise PhiDomainError(f"time argument must be nonnegative, got {t}")
    lam = order.lam if isinstance(order, PhiOrder) else float(order)
    z = t * op.eigenvalues
    if lam.is_integer():
        return phi_classical_array(int(lam), z)
    return phi_frac_array(lam, z)


def apply_phi(op: DiagonalizableOperator, order: Union[PhiOrder, float, int], t: float, v: State) -> State:
    """phi_lam(t A) v, evaluated modally."""
    factors = modal_phi(op, order, t)
    return State(values=op.from_modal(factors * op.to_modal(v.values)), time=v.time)


def apply_expm(op: DiagonalizableOperator, t: float, v: State) -> State:
    """exp(t A) v."""
    return apply_phi(op, 0, t, v)
