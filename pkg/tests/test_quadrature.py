"""Quadrature rules: node generation, exactness, and certification membership."""

import numpy as np
import pytest
from scipy import special

from certquad import Box, EvaluatorFailure
from certquad.enclosure import sobolev_integrand_batch, sobolev_integrand_enclosure
from certquad.network import ActivationKind, Network, forward_batch
from certquad.quadrature import (
    QuadratureRule,
    RuleKind,
    exact_for_affine_piece,
    gauss_tensor,
    integrate,
    midpoint,
)
from helpers import random_box, random_net


class TestNodeGeneration:
    def test_matches_scipy_reference(self):
        for n in range(1, 13):
            rule = gauss_tensor(n)
            ref_nodes, ref_weights = special.roots_legendre(n)
            np.testing.assert_allclose(rule.nodes_1d, ref_nodes, atol=1e-14)
            np.testing.assert_allclose(rule.weights_1d, ref_weights, atol=1e-14)

    def test_declared_degrees(self):
        assert midpoint().degree == 1
        assert midpoint().kind is RuleKind.MIDPOINT
        for n in (1, 2, 5):
            assert gauss_tensor(n).degree == 2 * n - 1

    def test_invalid_node_count(self):
        with pytest.raises(ValueError):
            gauss_tensor(0)
        with pytest.raises(ValueError):
            gauss_tensor(2.0)


class TestWeights:
    def test_positive_and_sum_to_volume(self):
        rng = np.random.default_rng(42)
        rules = [midpoint(), gauss_tensor(1), gauss_tensor(3), gauss_tensor(6)]
        for _ in range(25):
            d = int(rng.integers(1, 4))
            K = random_box(rng, d)
            for rule in rules:
                X, w = rule.nodes_weights(K)
                assert np.all(w > 0)
                assert w.sum() == pytest.approx(K.volume(), rel=1e-12)
                for x in X:
                    assert K.contains_point(x)

    def test_degenerate_axis(self):
        K = Box([1.0, 0.0], [1.0, 2.0])
        X, w = gauss_tensor(2).nodes_weights(K)
        assert np.all(X[:, 0] == 1.0)
        assert w.sum() == pytest.approx(0.0, abs=1e-300)


class TestIntegrate:
    def test_constant(self):
        val = integrate(midpoint(), lambda X: np.full(X.shape[0], 3.0), Box([0.0], [2.0]))
        assert val == 6.0

    def test_cubic_with_two_nodes(self):
        val = integrate(gauss_tensor(2), lambda X: X[:, 0] ** 3, Box([0.0], [1.0]))
        assert val == pytest.approx(0.25, abs=1e-15)

    def test_separable_quartic_2d(self):
        val = integrate(
            gauss_tensor(3),
            lambda X: X[:, 0] ** 2 * X[:, 1] ** 2,
            Box([0.0, 0.0], [1.0, 1.0]),
        )
        assert val == pytest.approx(1.0 / 9.0, abs=1e-14)

    def test_polynomial_exactness_random(self):
        rng = np.random.default_rng(7)
        for rule in (midpoint(), gauss_tensor(2), gauss_tensor(4)):
            for _ in range(10):
                d = int(rng.integers(1, 3))
                K = random_box(rng, d)
                coeffs = {}
                n_terms = int(rng.integers(2, 6))
                for _ in range(n_terms):
                    alpha = tuple(int(rng.integers(0, rule.degree + 1)) for _ in range(d))
                    if sum(alpha) > rule.degree and rule.kind is RuleKind.MIDPOINT:
                        continue  # midpoint degree is total, gauss degree is per-axis
                    coeffs[alpha] = float(rng.normal())

                def poly(X):
                    out = np.zeros(X.shape[0])
                    for alpha, c in coeffs.items():
                        term = np.full(X.shape[0], c)
                        for j, a in enumerate(alpha):
                            term = term * X[:, j] ** a
                        out += term
                    return out

                exact = 0.0
                for alpha, c in coeffs.items():
                    term = c
                    for j, a in enumerate(alpha):
                        term *= (K.hi[j] ** (a + 1) - K.lo[j] ** (a + 1)) / (a + 1)
                    exact += term
                got = integrate(rule, poly, K)
                assert got == pytest.approx(exact, rel=1e-10, abs=1e-10)

    def test_certification_membership(self):
        rng = np.random.default_rng(11)
        rules = [midpoint(), gauss_tensor(3)]
        for _ in range(15):
            net = random_net(rng, (2, 6, 1), ActivationKind.TANH)
            K = random_box(rng, 2)
            enc = sobolev_integrand_enclosure(net, 1, 2.0, K)
            for rule in rules:
                val = integrate(rule, lambda X: sobolev_integrand_batch(net, 1, 2.0, X), K)
                assert enc.lo * K.volume() <= val <= enc.hi * K.volume()

    def test_evaluator_failure_wrapped(self):
        def bad(X):
            raise ZeroDivisionError("boom")

        with pytest.raises(EvaluatorFailure):
            integrate(midpoint(), bad, Box([0.0], [1.0]))
        with pytest.raises(EvaluatorFailure):
            integrate(midpoint(), lambda X: np.zeros((2, 2)), Box([0.0], [1.0]))
        with pytest.raises(EvaluatorFailure):
            integrate(midpoint(), lambda X: np.full(X.shape[0], np.nan), Box([0.0], [1.0]))


def affine_relu_net(w, b):
    """Single affine layer wrapped as a ReLU network (no hidden units)."""
    return Network(
        (np.atleast_2d(np.asarray(w, dtype=float)),),
        (np.atleast_1d(np.asarray(b, dtype=float)),),
        ActivationKind.RELU,
    )


class TestExactForAffinePiece:
    def test_identity_squared(self):
        net = affine_relu_net([[1.0]], [0.0])
        val = exact_for_affine_piece(net, 2, Box([1.0], [2.0]))
        assert val == pytest.approx(7.0 / 3.0, rel=1e-14)

    def test_odd_power_sign_constant(self):
        net = affine_relu_net([[1.0]], [0.0])
        val = exact_for_affine_piece(net, 1, Box([1.0], [2.0]))
        assert val == pytest.approx(1.5, rel=1e-14)

    def test_odd_power_sign_change_declined(self):
        net = affine_relu_net([[1.0]], [-0.5])
        assert exact_for_affine_piece(net, 1, Box([0.0], [1.0])) is None

    def test_even_power_sign_change_still_exact(self):
        net = affine_relu_net([[1.0]], [-0.5])
        val = exact_for_affine_piece(net, 2, Box([0.0], [1.0]))
        assert val == pytest.approx(1.0 / 12.0, rel=1e-13)

    def test_kink_box_declined(self):
        net = Network(
            (np.array([[1.0]]), np.array([[1.0]])),
            (np.array([0.0]), np.array([0.0])),
            ActivationKind.RELU,
        )
        assert exact_for_affine_piece(net, 2, Box([-1.0], [1.0])) is None
        assert exact_for_affine_piece(net, 2, Box([1.0], [2.0])) == pytest.approx(
            7.0 / 3.0, rel=1e-13
        )

    def test_matches_fine_composite_midpoint(self):
        rng = np.random.default_rng(13)
        net = affine_relu_net([[0.7, -0.3], [0.2, 0.9]], [0.1, -0.4])
        K = Box([0.2, 0.2], [0.8, 0.9])
        val = exact_for_affine_piece(net, 2, K)
        assert val is not None
        # composite midpoint on a 400x400 grid as an independent check
        mids = np.stack([cell.midpoint() for cell in K.grid((400, 400))])
        vols = np.array([cell.volume() for cell in K.grid((400, 400))])
        total = float((np.abs(forward_batch(net, mids)) ** 2).sum(axis=1) @ vols)
        assert val == pytest.approx(total, rel=1e-4)

    def test_invalid_power(self):
        net = affine_relu_net([[1.0]], [0.0])
        with pytest.raises(ValueError):
            exact_for_affine_piece(net, 0, Box([0.0], [1.0]))
