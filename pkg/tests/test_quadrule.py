"""Gauss-type rules on [0, 1] and collocation node families."""

import math

import numpy as np
import pytest

from eqrf.exceptions import NodeSetError, QuadratureRangeError
from eqrf.quadrule import gauss_jacobi, gauss_legendre, node_relation_residual, node_set, power_weight_rule


@pytest.mark.parametrize("n", [1, 2, 5, 16, 48])
def test_gauss_legendre_exactness(n):
    """n points integrate s^k exactly for k <= 2n - 1."""
    rule = gauss_legendre(n)
    for k in range(2 * n):
        assert rule.integrate(lambda s: s**k).real == pytest.approx(1.0 / (k + 1), rel=1e-12)


@pytest.mark.parametrize("r", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_gauss_jacobi_monomial_exactness(n, r):
    """int_0^1 s^r s^k ds = 1/(r + k + 1) for k <= 2n - 1."""
    rule = gauss_jacobi(n, r)
    assert rule.weight_exponent == r
    for k in range(2 * n):
        assert float(np.sum(rule.weights * rule.nodes**k)) == pytest.approx(1.0 / (r + k + 1.0), rel=1e-12)


def test_rule_shape():
    """Nodes are sorted inside (0, 1) and weights positive."""
    rule = gauss_jacobi(16, 0.5)
    assert rule.n == 16
    assert np.all(np.diff(rule.nodes) > 0)
    assert 0.0 < rule.nodes[0] and rule.nodes[-1] < 1.0
    assert np.all(rule.weights > 0)


def test_two_point_legendre_nodes():
    rule = gauss_legendre(2)
    assert rule.nodes == pytest.approx([0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6], rel=1e-14)
    assert rule.weights == pytest.approx([0.5, 0.5], rel=1e-14)


def test_one_point_jacobi_rule():
    """int_0^1 s^(1/2) f(s) ds with one node: weight 2/3 at the mean 3/5."""
    rule = gauss_jacobi(1, 0.5)
    assert rule.nodes == pytest.approx([0.6], rel=1e-14)
    assert rule.weights == pytest.approx([2.0 / 3.0], rel=1e-14)


def test_rules_are_cached_read_only():
    rule = power_weight_rule(8, 0.25)
    assert power_weight_rule(8, 0.25) is rule
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


@pytest.mark.parametrize(
    "build",
    [
        lambda: gauss_legendre(0),
        lambda: gauss_legendre(65),
        lambda: gauss_jacobi(4, 0.0),
        lambda: gauss_jacobi(4, 1.0),
        lambda: power_weight_rule(4, -1.0),
    ],
    ids=["zero nodes", "too many nodes", "r = 0", "r = 1", "exponent -1"],
)
def test_rule_parameter_range(build):
    with pytest.raises(QuadratureRangeError):
        build()


class TestNodeRelation:
    def test_trapezoid(self):
        assert node_relation_residual((0.0, 1.0)) == pytest.approx(-1.0 / 6.0, abs=1e-15)

    def test_newton_cotes(self):
        """int_0^1 s (s - 1/3) (s - 1) ds = -1/36."""
        assert node_relation_residual((0.0, 1.0 / 3.0, 1.0)) == pytest.approx(-1.0 / 36.0, abs=1e-15)

    @pytest.mark.parametrize(
        "family, nu",
        [
            ("gauss", 2),
            ("gauss", 3),
            ("gauss", 5),
            ("gauss_radau", 2),
            ("gauss_radau", 3),
            ("gauss_lobatto", 3),
            ("gauss_lobatto", 4),
        ],
    )
    def test_gauss_families_satisfy_relation(self, family, nu):
        assert abs(node_set(family, nu).relation_residual) <= 1e-13

    def test_single_node(self):
        """EQRF1: the relation holds only for the midpoint."""
        assert node_set("single", 1, c1=0.5).relation_residual == pytest.approx(0.0, abs=1e-16)
        assert node_set("single", 1, c1=0.0).relation_residual == pytest.approx(0.5)

    def test_matches_direct_quadrature(self, rng):
        """Random node sets against Gauss-Legendre integration of prod (s - c_i)."""
        rule = gauss_legendre(8)
        for nu in range(1, 7):
            c = np.sort(rng.uniform(0.0, 1.0, nu))
            direct = rule.integrate(lambda s: np.prod(s[:, None] - c[None, :], axis=1)).real
            assert node_relation_residual(c) == pytest.approx(direct, abs=1e-13)


class TestNodeSet:
    def test_families(self):
        assert node_set("trapezoid", 2).c == (0.0, 1.0)
        assert node_set("gauss_radau", 2).c == pytest.approx((0.0, 2.0 / 3.0), abs=1e-14)
        assert node_set("gauss_lobatto", 3).c == pytest.approx((0.0, 0.5, 1.0), abs=1e-14)
        custom = node_set("custom", 3, nodes=[0.0, 1.0 / 3.0, 1.0])
        assert custom.nu == 3 and custom.family == "custom"

    def test_label(self):
        assert node_set("trapezoid", 2).label == "0 1"
        assert node_set("single", 1, c1=0.5).label == "0.5"

    @pytest.mark.parametrize(
        "family, nu, kwargs",
        [
            ("custom", 2, {"nodes": [0.5, 0.5]}),
            ("custom", 2, {"nodes": [0.0, 1.5]}),
            ("custom", 3, {"nodes": [0.0, 1.0]}),
            ("trapezoid", 3, {}),
            ("gauss_radau", 1, {}),
            ("gauss_lobatto", 2, {}),
            ("single", 1, {}),
            ("gauss", 0, {}),
            ("gauss", 65, {}),
            ("gauss_lobatto", 65, {}),
        ],
        ids=[
            "confluent",
            "outside",
            "wrong count",
            "trapezoid nu",
            "radau nu",
            "lobatto nu",
            "no c1",
            "nu 0",
            "gauss nu 65",
            "lobatto nu 65",
        ],
    )
    def test_invalid(self, family, nu, kwargs):
        with pytest.raises(NodeSetError):
            node_set(family, nu, **kwargs)
