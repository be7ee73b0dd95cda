import numpy as np
import pytest

from plastiplate.ops import sym2
from plastiplate.ops.sym2 import (Sym2, YieldSurface, dev_r, frobenius_inner,
                                  in_yield_set, inner_r, lift_dual, norm_dual,
                                  norm_r, random_sym2, support_Hr)

I = Sym2.identity()
PURE_SHEAR = Sym2.diag(1.0, -1.0)


class TestNorms:

    def test_known_values(self):
        np.testing.assert_allclose(norm_r(PURE_SHEAR), np.sqrt(2.0))
        np.testing.assert_allclose(norm_r(I), np.sqrt(2.0 / 3.0))
        np.testing.assert_allclose(norm_dual(I), np.sqrt(6.0))
        np.testing.assert_allclose(inner_r(I, I), 2.0 / 3.0)

    def test_off_diagonal_counts_twice(self):
        xi = Sym2(0.0, 0.0, 1.0)
        np.testing.assert_allclose(frobenius_inner(xi, xi), 2.0)
        np.testing.assert_allclose(norm_r(xi), np.sqrt(2.0))

    def test_norm_chain(self, rng):
        xi = random_sym2(rng, 1000)
        fro = sym2.frobenius_norm(xi)
        r, dual = norm_r(xi), norm_dual(xi)
        assert np.all(r <= fro * (1 + 1e-14))
        assert np.all(fro <= dual * (1 + 1e-14))
        assert np.all(dual <= np.sqrt(3.0) * fro * (1 + 1e-14))
        assert np.all(fro <= np.sqrt(3.0) * r * (1 + 1e-14))

    def test_dual_pairing_inequality(self, rng):
        xi, eta = random_sym2(rng, 1000), random_sym2(rng, 1000)
        lhs = np.abs(frobenius_inner(xi, eta))
        assert np.all(lhs <= norm_r(xi) * norm_dual(eta) * (1 + 1e-12))

    def test_dual_sup_is_attained(self, rng):
        # the maximizer of ξ:η over |ξ|_r ≤ 1 is lift_dual(η)/|η|_*
        eta = random_sym2(rng, 200)
        xi = lift_dual(eta) / norm_dual(eta)[:, None]
        np.testing.assert_allclose(norm_r(xi), 1.0, rtol=1e-12)
        np.testing.assert_allclose(
            frobenius_inner(xi, eta), norm_dual(eta), rtol=1e-12)

    def test_stack_shapes(self, rng):
        xi = random_sym2(rng, (4, 3, 2))
        assert norm_r(xi).shape == (4, 3, 2)
        assert dev_r(xi).shape == (4, 3, 2, 3)


class TestDevLift:

    def test_identity(self):
        np.testing.assert_allclose(lift_dual(I), 3.0 * np.asarray(I))
        np.testing.assert_allclose(dev_r(I), np.asarray(I) / 3.0)

    def test_mutually_inverse(self, rng):
        xi = random_sym2(rng, 500)
        np.testing.assert_allclose(dev_r(lift_dual(xi)), xi, atol=1e-13)
        np.testing.assert_allclose(lift_dual(dev_r(xi)), xi, atol=1e-13)

    def test_inner_r_is_pairing_with_dev(self, rng):
        xi, zeta = random_sym2(rng, 100), random_sym2(rng, 100)
        np.testing.assert_allclose(
            inner_r(xi, zeta), frobenius_inner(dev_r(xi), zeta), atol=1e-13)


class TestYieldSurface:

    def test_support_function(self):
        K = YieldSurface(2.0)
        np.testing.assert_allclose(support_Hr(I, K), 2.0 * np.sqrt(6.0))

    def test_support_is_homogeneous_and_subadditive(self, rng):
        K = YieldSurface(1.5)
        xi, eta = random_sym2(rng, 300), random_sym2(rng, 300)
        np.testing.assert_allclose(
            support_Hr(3.0 * xi, K), 3.0 * support_Hr(xi, K), rtol=1e-13)
        assert np.all(
            support_Hr(xi + eta, K) <= (support_Hr(xi, K) +
                                        support_Hr(eta, K)) * (1 + 1e-13))

    def test_membership(self):
        K = YieldSurface(np.sqrt(2.0))
        assert in_yield_set(PURE_SHEAR, K)
        assert not in_yield_set(1.001 * np.asarray(PURE_SHEAR), K)

    @pytest.mark.parametrize('alpha0', [0.0, -1.0])
    def test_rejects_non_positive_radius(self, alpha0):
        with pytest.raises(ValueError):
            YieldSurface(alpha0)


class TestSym2Type:

    def test_matrix_round_trip(self):
        m = np.array([[1.0, 0.5], [0.5, -2.0]])
        np.testing.assert_array_equal(Sym2.from_matrix(m).to_matrix(), m)

    def test_rejects_asymmetric(self):
        with pytest.raises(AssertionError):
            Sym2.from_matrix([[1.0, 0.5], [0.0, 1.0]])

    def test_mandel_dot_is_frobenius(self, rng):
        xi, zeta = random_sym2(rng, 50), random_sym2(rng, 50)
        dot = np.sum(sym2.to_mandel(xi) * sym2.to_mandel(zeta), axis=-1)
        np.testing.assert_allclose(dot, frobenius_inner(xi, zeta), atol=1e-13)
