"""
Gauss-type quadrature on [0, 1] and collocation node families.

Rules are computed with the Golub-Welsch method: the Jacobi matrix of the
orthogonal polynomials for the weight (1 - s)^a s^b is a symmetric
tridiagonal matrix whose eigenvalues are the nodes; the weights are the
squared first eigenvector components scaled by the zeroth moment.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import beta as beta_function

from eqrf.exceptions import NodeSetError, QuadratureRangeError
from eqrf.types import NodeFamily, RealArray

MAX_NODES = 64


@dataclass(frozen=True)
class QuadRule:
    """
    Quadrature rule on [0, 1] for the weight s^weight_exponent.

    `sum(weights * f(nodes))` approximates the integral of s^weight_exponent * f(s).
    """

    nodes: RealArray
    weights: RealArray
    weight_exponent: float = 0.0

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    def integrate(self, f: Callable[[RealArray], np.ndarray]) -> complex:
        """Apply the rule to a vectorized integrand."""
        return complex(np.sum(self.weights * f(self.nodes)))


@dataclass(frozen=True)
class NodeSet:
    """Non-confluent collocation points c_1..c_nu in [0, 1]."""

    c: Tuple[float, ...]
    family: NodeFamily
    relation_residual: float = field(default=0.0)

    @property
    def nu(self) -> int:
        return len(self.c)

    @property
    def label(self) -> str:
        return " ".join(f"{c:.12g}" for c in self.c)


def _jacobi_matrix(n: int, a: float, b: float) -> Tuple[RealArray, RealArray]:
    """Recurrence coefficients of the Jacobi polynomials for (1-x)^a (1+x)^b on [-1, 1]."""
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (ab + 2.0)
    if n > 1:
        kk = k[1:]
        diag[1:] = (b * b - a * a) / ((2.0 * kk + ab) * (2.0 * kk + ab + 2.0))

    off_sq = np.empty(max(n - 1, 0))
    if n > 1:
        off_sq[0] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) ** 2 * (3.0 + ab))
    if n > 2:
        kk = k[2:]
        two_k = 2.0 * kk + ab
        off_sq[1:] = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) / (two_k**2 * (two_k + 1.0) * (two_k - 1.0))
    return diag, np.sqrt(off_sq)


def _golub_welsch(n: int, a: float, b: float) -> Tuple[RealArray, RealArray]:
    diag, off = _jacobi_matrix(n, a, b)
    if n == 1:
        x = diag.copy()
        vectors = np.ones((1, 1))
    else:
        try:
            x, vectors = eigh_tridiagonal(diag, off)
        except LinAlgError as exc:  # pragma: no cover
            raise QuadratureRangeError(f"eigensolver failed for n={n}, a={a}, b={b}") from exc
    order = np.argsort(x)
    x = x[order]
    first = vectors[0, order]
    # zeroth moment of (1-s)^a s^b on [0, 1]
    weights = float(beta_function(a + 1.0, b + 1.0)) * first**2
    nodes = 0.5 * (x + 1.0)
    return nodes, weights


@lru_cache(maxsize=256)
def power_weight_rule(n: int, exponent: float) -> QuadRule:
    """
    n-point Gauss rule on [0, 1] for the weight s^exponent, exponent > -1.

    Exact for polynomials of degree <= 2n - 1. Results are cached and
    returned with read-only arrays.
    """
    if n < 1:
        raise QuadratureRangeError(f"number of nodes must be positive, got {n}")
    if not math.isfinite(exponent) or exponent <= -1.0:
        raise QuadratureRangeError(f"weight exponent must be > -1, got {exponent}")
    nodes, weights = _golub_welsch(n, 0.0, float(exponent))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes=nodes, weights=weights, weight_exponent=float(exponent))


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_NODES:
        raise QuadratureRangeError(f"number of nodes must be in [1, {MAX_NODES}], got {n}")


def gauss_legendre(n: int) -> QuadRule:
    """n-point Gauss-Legendre rule mapped to [0, 1]."""
    _check_n(n)
    return power_weight_rule(int(n), 0.0)


def gauss_jacobi(n: int, r: float) -> QuadRule:
    """n-point Gauss rule for the weight s^r on [0, 1], 0 < r < 1."""
    _check_n(n)
    if not 0.0 < r < 1.0:
        raise QuadratureRangeError(f"weight exponent r must lie in (0, 1), got {r}")
    return power_weight_rule(int(n), float(r))


def _interior_nodes(n: int, a: float, b: float) -> RealArray:
    if n == 0:
        return np.empty(0)
    nodes, _ = _golub_welsch(n, a, b)
    return nodes


def node_relation_residual(c: Sequence[float]) -> float:
    """
    Integral over [0, 1] of prod_i (s - c_i).

    Expanded through the elementary symmetric polynomials e_k of the nodes:
    1/(nu+1) - e_1/nu + e_2/(nu-1) - ... + (-1)^nu e_nu. EQRF-nu reaches
    order 1 + nu*r when this vanishes.
    """
    nodes = np.asarray(c, dtype=float)
    _check_distinct(nodes)
    nu = nodes.size
    # monic coefficients: [1, -e_1, e_2, -e_3, ...]
    coefficients = np.poly(nodes)
    return math.fsum(float(coefficients[k]) / (nu + 1 - k) for k in range(nu + 1))


def _check_distinct(nodes: RealArray) -> None:
    if nodes.ndim != 1 or nodes.size == 0:
        raise NodeSetError("at least one collocation node is required")
    if not np.all(np.isfinite(nodes)):
        raise NodeSetError("collocation nodes must be finite")
    if np.unique(nodes).size != nodes.size:
        raise NodeSetError(f"confluent collocation nodes: {nodes.tolist()}")


def node_set(
    family: NodeFamily,
    nu: int,
    nodes: Optional[Sequence[float]] = None,
    c1: Optional[float] = None,
) -> NodeSet:
    """
    Build a named collocation node family on [0, 1].

    Args:
        family: single (nu=1, point given by `c1`), trapezoid (nu=2),
            gauss (any nu), gauss_radau (left endpoint 0 fixed, nu >= 2),
            gauss_lobatto (nu >= 3) or custom (explicit `nodes`)
        nu: number of collocation points
        nodes: explicit points for the custom family
        c1: the point of the single family
    """
    if nu < 1:
        raise NodeSetError(f"nu must be positive, got {nu}")
    if family in ("gauss", "gauss_radau", "gauss_lobatto") and nu > MAX_NODES:
        raise NodeSetError(f"{family} supports at most {MAX_NODES} nodes, got {nu}")

    if family == "single":
        if nu != 1 or c1 is None:
            raise NodeSetError("the single family needs nu=1 and an explicit c1")
        points = np.array([float(c1)])
    elif family == "trapezoid":
        if nu != 2:
            raise NodeSetError("the trapezoid family is only defined for nu=2")
        points = np.array([0.0, 1.0])
    elif family == "gauss":
        points = power_weight_rule(nu, 0.0).nodes.copy()
    elif family == "gauss_radau":
        if nu < 2:
            raise NodeSetError("gauss_radau needs nu >= 2")
        points = np.concatenate([[0.0], _interior_nodes(nu - 1, 0.0, 1.0)])
    elif family == "gauss_lobatto":
        if nu < 3:
            raise NodeSetError("gauss_lobatto needs nu >= 3")
        points = np.concatenate([[0.0], _interior_nodes(nu - 2, 1.0, 1.0), [1.0]])
    elif family == "custom":
        if nodes is None or len(nodes) != nu:
            raise NodeSetError(f"custom family needs exactly {nu} explicit nodes")
        points = np.asarray(nodes, dtype=float)
    else:
        raise NodeSetError(f"unknown node family {family!r}")

    if np.any(points < 0.0) or np.any(points > 1.0):
        raise NodeSetError(f"collocation nodes must lie in [0, 1]: {points.tolist()}")
    residual = node_relation_residual(points)
    return NodeSet(c=tuple(float(p) for p in points), family=family, relation_residual=residual)
