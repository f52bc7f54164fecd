"""Enclosures of values, Jacobians, Hessians, integrands, and residuals.

The load-bearing tests are the sampling sweeps: whatever a box encloses,
densely sampled true values (from the double-precision point recursions)
must land inside, with zero violations.
"""

import math

import numpy as np
import pytest

from certquad import (
    Box,
    CoefficientEnclosureError,
    DimensionMismatch,
    IndexOutOfRange,
    Interval,
    RoundingPolicy,
    UnsupportedActivation,
    UnsupportedDerivativeOrder,
    rounding,
)
from certquad.enclosure import (
    EllipticOperator,
    activation_pattern,
    affine_on_box,
    enclosure_hoelder_params,
    fval,
    hess,
    integrand_hoelder_params,
    jac,
    residual_batch,
    residual_enclosure,
    residual_hoelder_params,
    residual_point,
    sobolev_integrand_batch,
    sobolev_integrand_enclosure,
    sobolev_integrand_point,
)
from certquad.network import ActivationKind, Network, derivatives_batch, forward_batch
from helpers import constant_net, random_box, random_net, unit_scalar_net, zero_net


def relu_identity_on_positives():
    return Network(
        (np.array([[1.0]]), np.array([[1.0]])),
        (np.array([0.0]), np.array([0.0])),
        ActivationKind.RELU,
    )


def x_minus_x_net():
    # hidden layer carries (x, x), output subtracts the copies
    return Network(
        (np.array([[1.0], [1.0]]), np.array([[1.0, -1.0]])),
        (np.zeros(2), np.zeros(1)),
        ActivationKind.RELU,
    )


class TestFval:
    def test_relu_identity_passthrough(self):
        with rounding(RoundingPolicy.EXACT):
            out = fval(relu_identity_on_positives(), 2, Box([1.0], [2.0]))
        assert out.axis(0) == Interval(1.0, 2.0)

    def test_unit_tanh_output_range(self):
        out = fval(unit_scalar_net(), 2, Box([0.0], [1.0]))
        assert out.axis(0).lo <= 0.0
        assert out.axis(0).contains(math.tanh(1.0))
        assert out.axis(0).hi <= math.tanh(1.0) + 1e-12

    def test_dependency_blindness_on_difference_net(self):
        with rounding(RoundingPolicy.EXACT):
            out = fval(x_minus_x_net(), 2, Box([0.0], [1.0]))
        assert out.axis(0) == Interval(-1.0, 1.0)

    def test_layer_index_validation(self):
        net = unit_scalar_net()
        K = Box([0.0], [1.0])
        with pytest.raises(IndexOutOfRange):
            fval(net, 0, K)
        with pytest.raises(IndexOutOfRange):
            fval(net, 3, K)
        with pytest.raises(DimensionMismatch):
            fval(net, 1, Box([0.0, 0.0], [1.0, 1.0]))

    def test_soundness_sweep(self):
        rng = np.random.default_rng(42)
        for kind in (ActivationKind.TANH, ActivationKind.SIGMOID, ActivationKind.RELU):
            for _ in range(20):
                net = random_net(rng, (2, 9, 5, 1), kind)
                K = random_box(rng, 2)
                out = fval(net, net.depth + 1, K)
                vals = forward_batch(net, K.sample(rng, 300))
                for i in range(net.output_dim):
                    assert np.all(vals[:, i] >= out.lo[i]) and np.all(vals[:, i] <= out.hi[i])

    def test_isotonicity(self):
        rng = np.random.default_rng(3)
        net = random_net(rng, (2, 7, 1), ActivationKind.TANH)
        for _ in range(50):
            K = random_box(rng, 2)
            shrink = 0.3 * (K.hi - K.lo)
            K2 = Box(K.lo + shrink, K.hi - shrink)
            a = fval(net, 2, K)
            b = fval(net, 2, K2)
            assert np.all(a.lo <= b.lo) and np.all(b.hi <= a.hi)


class TestJac:
    def test_unit_tanh_derivative_range(self):
        J = jac(unit_scalar_net(), 0, Box([0.0], [1.0]))
        e = J.entry(0, 0)
        lo_expect = 1.0 - math.tanh(1.0) ** 2
        assert lo_expect - 1e-12 < e.lo <= lo_expect
        assert 1.0 <= e.hi < 1.0 + 1e-12

    def test_last_layer_is_exact_weights(self):
        rng = np.random.default_rng(1)
        net = random_net(rng, (3, 6, 2), ActivationKind.TANH)
        J = jac(net, net.depth, random_box(rng, 3))
        assert J.width() == 0.0
        np.testing.assert_array_equal(J.lo, net.weights[-1])

    def test_singleton_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        h = 1e-6
        net = random_net(rng, (2, 10, 3), ActivationKind.SIGMOID)
        for _ in range(25):
            x = rng.uniform(-1, 1, size=2)
            J = jac(net, 0, Box(x, x))
            for j in range(2):
                e = np.zeros(2)
                e[j] = h
                fd = (forward_batch(net, (x + e)[None]) - forward_batch(net, (x - e)[None])) / (
                    2 * h
                )
                for i in range(3):
                    assert abs(J.lo[i, j] - fd[0, i]) < 1e-6 * max(1, abs(fd[0, i]))

    def test_soundness_sweep(self):
        rng = np.random.default_rng(7)
        for kind in (ActivationKind.TANH, ActivationKind.SIGMOID):
            for _ in range(15):
                net = random_net(rng, (2, 8, 6, 2), kind)
                K = random_box(rng, 2)
                J = jac(net, 0, K)
                _, jb, _ = derivatives_batch(net, K.sample(rng, 200), order=1)
                assert np.all(jb >= J.lo[None] - 1e-300) and np.all(jb <= J.hi[None] + 1e-300)

    def test_relu_rejected(self):
        with pytest.raises(UnsupportedDerivativeOrder):
            jac(relu_identity_on_positives(), 0, Box([0.0], [1.0]))


class TestHess:
    def test_base_layer_is_zero(self):
        rng = np.random.default_rng(2)
        net = random_net(rng, (3, 5, 2), ActivationKind.TANH)
        H = hess(net, 0, net.depth, random_box(rng, 3))
        assert H.width() == 0.0
        assert np.all(H.lo == 0.0) and np.all(H.hi == 0.0)

    def test_unit_tanh_at_origin_singleton(self):
        H = hess(unit_scalar_net(), 0, 0, Box([0.0], [0.0]))
        e = H.entry(0, 0)
        assert e.contains(0.0)
        assert e.width() < 1e-13

    def test_output_index_validation(self):
        net = unit_scalar_net()
        with pytest.raises(IndexOutOfRange):
            hess(net, 1, 0, Box([0.0], [1.0]))
        with pytest.raises(IndexOutOfRange):
            hess(net, -1, 0, Box([0.0], [1.0]))

    def test_narrow_box_contains_sampled_hessians(self):
        rng = np.random.default_rng(11)
        net = random_net(rng, (2, 16, 1), ActivationKind.TANH)
        for _ in range(20):
            mid = rng.uniform(-1, 1, size=2)
            K = Box(mid - 0.05, mid + 0.05)
            H = hess(net, 0, 0, K)
            _, _, hb = derivatives_batch(net, K.sample(rng, 100), order=2)
            assert np.all(hb[:, 0] >= H.lo[None] - 1e-300)
            assert np.all(hb[:, 0] <= H.hi[None] + 1e-300)

    def test_soundness_sweep_wide_boxes(self):
        rng = np.random.default_rng(13)
        for kind in (ActivationKind.TANH, ActivationKind.SIGMOID):
            for _ in range(10):
                net = random_net(rng, (2, 6, 4, 2), kind)
                K = random_box(rng, 2)
                for i in range(2):
                    H = hess(net, i, 0, K)
                    _, _, hb = derivatives_batch(net, K.sample(rng, 150), order=2)
                    assert np.all(hb[:, i] >= H.lo[None]) and np.all(hb[:, i] <= H.hi[None])

    def test_singleton_matches_batch_oracle(self):
        rng = np.random.default_rng(17)
        net = random_net(rng, (2, 8, 1), ActivationKind.SIGMOID)
        for _ in range(20):
            x = rng.uniform(-1, 1, size=2)
            H = hess(net, 0, 0, Box(x, x))
            _, _, hb = derivatives_batch(net, x[None], order=2)
            np.testing.assert_allclose(H.lo, hb[0, 0], rtol=1e-9, atol=1e-12)
            assert H.width() < 1e-11


class TestSobolevIntegrand:
    def test_constant_network_point(self):
        net = constant_net(-1.5)
        assert sobolev_integrand_point(net, 0, 2.0, [0.3]) == pytest.approx(2.25)
        assert sobolev_integrand_point(net, 0, 3.0, [0.3]) == pytest.approx(1.5**3)

    def test_unit_tanh_at_origin(self):
        net = unit_scalar_net()
        assert sobolev_integrand_point(net, 1, 2.0, [0.0]) == pytest.approx(1.0)
        assert sobolev_integrand_point(net, 2, 2.0, [0.0]) == pytest.approx(1.0)

    def test_term_count_in_two_dims(self):
        # 1 value + 2 gradient + 3 distinct second-derivative terms
        rng = np.random.default_rng(19)
        net = random_net(rng, (2, 5, 1), ActivationKind.TANH)
        x = np.array([0.2, -0.4])
        v, J, H = derivatives_batch(net, x[None], order=2)
        p = 2.0
        expect = (
            abs(v[0, 0]) ** p
            + sum(abs(J[0, 0, j]) ** p for j in range(2))
            + abs(H[0, 0, 0, 0]) ** p
            + abs(H[0, 0, 0, 1]) ** p
            + abs(H[0, 0, 1, 1]) ** p
        )
        assert sobolev_integrand_point(net, 2, p, x) == pytest.approx(expect, rel=1e-13)

    def test_constant_network_enclosure(self):
        net = constant_net(2.0)
        out = sobolev_integrand_enclosure(net, 0, 2.0, Box([-1.0], [1.0]))
        assert out.contains(4.0)
        assert out.width() < 1e-10

    def test_singleton_consistency(self):
        rng = np.random.default_rng(23)
        net = random_net(rng, (2, 7, 2), ActivationKind.TANH)
        for k in (0, 1, 2):
            for _ in range(20):
                x = rng.uniform(-1, 1, size=2)
                out = sobolev_integrand_enclosure(net, k, 2.0, Box(x, x))
                val = sobolev_integrand_point(net, k, 2.0, x)
                assert out.lo - 1e-9 <= val <= out.hi + 1e-9

    def test_enclosure_soundness_sweep(self):
        rng = np.random.default_rng(29)
        for k in (0, 1, 2):
            for _ in range(10):
                net = random_net(rng, (2, 6, 1), ActivationKind.TANH)
                K = random_box(rng, 2)
                out = sobolev_integrand_enclosure(net, k, 2.0, K)
                vals = sobolev_integrand_batch(net, k, 2.0, K.sample(rng, 200))
                assert np.all(vals >= out.lo) and np.all(vals <= out.hi)

    def test_isotonicity(self):
        rng = np.random.default_rng(31)
        net = random_net(rng, (2, 6, 1), ActivationKind.SIGMOID)
        for _ in range(30):
            K = random_box(rng, 2)
            shrink = 0.25 * (K.hi - K.lo)
            K2 = Box(K.lo + shrink, K.hi - shrink)
            a = sobolev_integrand_enclosure(net, 2, 2.0, K)
            b = sobolev_integrand_enclosure(net, 2, 2.0, K2)
            assert a.lo <= b.lo and b.hi <= a.hi

    def test_relu_allowed_only_for_values(self):
        net = relu_identity_on_positives()
        out = sobolev_integrand_enclosure(net, 0, 2.0, Box([0.0], [1.0]))
        assert out.contains(0.25)
        with pytest.raises(UnsupportedDerivativeOrder):
            sobolev_integrand_enclosure(net, 1, 2.0, Box([0.0], [1.0]))

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            sobolev_integrand_point(unit_scalar_net(), 0, 0.5, [0.0])


class TestActivationPattern:
    def test_single_neuron_signs(self):
        net = relu_identity_on_positives()
        assert activation_pattern(net, [2.0]) == ((1,),)
        assert activation_pattern(net, [-1.0]) == ((-1,),)
        assert activation_pattern(net, [0.0]) == ((0,),)

    def test_non_relu_rejected(self):
        with pytest.raises(UnsupportedActivation):
            activation_pattern(unit_scalar_net(), [0.0])


class TestAffineOnBox:
    def test_single_neuron(self):
        net = relu_identity_on_positives()
        assert affine_on_box(net, Box([1.0], [2.0])) is True
        assert affine_on_box(net, Box([-1.0], [1.0])) is False

    def test_true_implies_affine(self):
        rng = np.random.default_rng(37)
        found = 0
        net = random_net(rng, (2, 12, 6, 1), ActivationKind.RELU)
        while found < 10:
            mid = rng.uniform(-1, 1, size=2)
            K = Box(mid - 0.01, mid + 0.01)
            if not affine_on_box(net, K):
                continue
            found += 1
            # fit the affine map from d+1 points, verify on fresh samples
            base = forward_batch(net, mid[None])[0]
            G = np.zeros((1, 2))
            for j in range(2):
                e = np.zeros(2)
                e[j] = 0.009
                G[:, j] = (forward_batch(net, (mid + e)[None])[0] - base) / 0.009
            pts = K.sample(rng, 1000)
            pred = base[None] + (pts - mid) @ G.T
            np.testing.assert_allclose(forward_batch(net, pts), pred, atol=1e-9)

    def test_non_relu_rejected(self):
        with pytest.raises(UnsupportedActivation):
            affine_on_box(unit_scalar_net(), Box([0.0], [1.0]))


def wavefront_source():
    """Point and box evaluators for -4 (1 - tanh(z)^2) tanh(z), z = x1+x2-1."""

    def pt(X):
        t = np.tanh(X[:, 0] + X[:, 1] - 1.0)
        return -4.0 * (1.0 - t * t) * t

    def bx(K):
        z = K.axis(0) + K.axis(1) - 1.0
        t = z.tanh()
        return -4.0 * (1.0 - t * t) * t

    return pt, bx


class TestResidual:
    def test_zero_network_zero_source(self):
        net = zero_net(2)
        op = EllipticOperator.laplacian(2, g=0.0)
        assert residual_point(net, op, 2.0, [0.3, 0.4]) == 0.0
        with rounding(RoundingPolicy.EXACT):
            out = residual_enclosure(net, op, 2.0, Box([0.0, 0.0], [1.0, 1.0]))
        assert out == Interval(0.0, 0.0)

    def test_laplacian_assembles_trace_of_hessian(self):
        rng = np.random.default_rng(41)
        net = random_net(rng, (2, 6, 1), ActivationKind.TANH)
        K = random_box(rng, 2)
        op = EllipticOperator.laplacian(2, g=0.0)
        with rounding(RoundingPolicy.EXACT):
            H = hess(net, 0, 0, K)
            manual = (-(H.entry(0, 0) + H.entry(1, 1))).abs_pow(2.0)
            out = residual_enclosure(net, op, 2.0, K)
        assert out.lo == pytest.approx(manual.lo, rel=1e-12, abs=1e-300)
        assert out.hi == pytest.approx(manual.hi, rel=1e-12)

    def test_wavefront_residual_containment(self):
        rng = np.random.default_rng(43)
        pt, bx = wavefront_source()
        op = EllipticOperator(2, [[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0], 0.0, (pt, bx))
        net = random_net(rng, (2, 8, 1), ActivationKind.TANH)
        for _ in range(15):
            K = Box(*sorted_pair(rng))
            out = residual_enclosure(net, op, 2.0, K)
            vals = residual_batch(net, op, 2.0, K.sample(rng, 1000))
            assert np.all(vals >= out.lo) and np.all(vals <= out.hi)

    def test_point_enclosure_consistency(self):
        rng = np.random.default_rng(47)
        net = random_net(rng, (2, 5, 1), ActivationKind.SIGMOID)
        op = EllipticOperator(2, [[1.0, 0.5], [0.5, 1.0]], [0.2, -0.1], 0.3, 1.0)
        for _ in range(20):
            x = rng.uniform(0, 1, size=2)
            out = residual_enclosure(net, op, 2.0, Box(x, x))
            val = residual_point(net, op, 2.0, x)
            assert out.lo - 1e-9 <= val <= out.hi + 1e-9

    def test_vector_output_rejected(self):
        rng = np.random.default_rng(53)
        net = random_net(rng, (2, 5, 2), ActivationKind.TANH)
        with pytest.raises(DimensionMismatch):
            residual_point(net, EllipticOperator.laplacian(2), 2.0, [0.0, 0.0])

    def test_bad_coefficient_rejected(self):
        with pytest.raises(CoefficientEnclosureError):
            EllipticOperator(1, [["not a coefficient"]], [0.0], 0.0, 0.0)


def sorted_pair(rng):
    lo = rng.uniform(0, 0.7, size=2)
    hi = lo + rng.uniform(0.05, 0.3, size=2)
    return lo, hi


class TestHoelderParams:
    def test_single_linear_layer_closed_form(self):
        W = np.array([[1.0, -2.0], [0.5, 3.0]])
        net = Network((W,), (np.zeros(2),), ActivationKind.TANH)
        hp = enclosure_hoelder_params(net, "fval", Box([0.0, 0.0], [1.0, 1.0]))
        assert hp.C == 3.5  # max row sum of |W|
        assert hp.gamma == 1.0

    def test_unit_tanh_closed_form(self):
        hp = enclosure_hoelder_params(unit_scalar_net(), "fval", Box([0.0], [1.0]))
        assert hp.C == 1.0
        assert hp.gamma == 1.0

    def test_fval_width_bound_on_subboxes(self):
        rng = np.random.default_rng(59)
        for kind in (ActivationKind.TANH, ActivationKind.SIGMOID):
            net = random_net(rng, (2, 8, 3, 1), kind)
            omega = Box([-1.0, -1.0], [1.0, 1.0])
            hp = enclosure_hoelder_params(net, "fval", omega)
            for _ in range(300):
                K = sub_box(rng, omega)
                w = fval(net, net.depth + 1, K).width()
                assert w <= hp.C * K.width() ** hp.gamma + 1e-12

    def test_jac_hess_width_bounds_on_subboxes(self):
        rng = np.random.default_rng(61)
        net = random_net(rng, (2, 6, 4, 1), ActivationKind.TANH)
        omega = Box([-1.0, -1.0], [1.0, 1.0])
        hpj = enclosure_hoelder_params(net, "jac", omega)
        hph = enclosure_hoelder_params(net, "hess", omega)
        for _ in range(200):
            K = sub_box(rng, omega)
            assert jac(net, 0, K).width() <= hpj.C * K.width() + 1e-10
            assert hess(net, 0, 0, K).width() <= hph.C * K.width() + 1e-10

    def test_integrand_width_bound_on_subboxes(self):
        rng = np.random.default_rng(67)
        net = random_net(rng, (2, 6, 1), ActivationKind.TANH)
        omega = Box([0.0, 0.0], [1.0, 1.0])
        for k in (0, 1, 2):
            hp = integrand_hoelder_params(net, k, 2.0, omega)
            for _ in range(150):
                K = sub_box(rng, omega)
                w = sobolev_integrand_enclosure(net, k, 2.0, K).width()
                assert w <= hp.C * K.width() ** hp.gamma + 1e-10

    def test_residual_constant_coefficients_bound(self):
        rng = np.random.default_rng(71)
        net = random_net(rng, (2, 6, 1), ActivationKind.TANH)
        omega = Box([0.0, 0.0], [1.0, 1.0])
        op = EllipticOperator(2, [[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0], 0.0, 0.5)
        hp = residual_hoelder_params(net, op, 2.0, omega)
        for _ in range(150):
            K = sub_box(rng, omega)
            w = residual_enclosure(net, op, 2.0, K).width()
            assert w <= hp.C * K.width() + 1e-10

    def test_residual_varying_coefficient_rejected(self):
        net = random_net(np.random.default_rng(1), (2, 4, 1), ActivationKind.TANH)
        pt, bx = wavefront_source()
        op = EllipticOperator(2, [[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0], 0.0, (pt, bx))
        with pytest.raises(CoefficientEnclosureError):
            residual_hoelder_params(net, op, 2.0, Box([0.0, 0.0], [1.0, 1.0]))

    def test_relu_fval_params(self):
        net = relu_identity_on_positives()
        hp = enclosure_hoelder_params(net, "fval", Box([-1.0], [1.0]))
        assert hp.C == 1.0 and hp.gamma == 1.0
        with pytest.raises(UnsupportedDerivativeOrder):
            enclosure_hoelder_params(net, "jac", Box([-1.0], [1.0]))


def sub_box(rng, omega):
    lo = rng.uniform(omega.lo, omega.hi)
    hi = rng.uniform(lo, omega.hi)
    return Box(lo, hi)
