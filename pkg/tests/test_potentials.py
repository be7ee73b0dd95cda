import numpy as np
import pytest

from plastiplate.ops.potentials import (F_lambda, NortonHoffParams,
                                        TruncationParams, dF_lambda, dphi_N,
                                        dpsi_lambda, flow_factor, phi_N,
                                        psi_lambda)
from plastiplate.ops.sym2 import (Sym2, frobenius_inner, norm_dual, norm_r,
                                  random_sym2)
from plastiplate.oracle import conjugate_sup

PURE_SHEAR = np.asarray(Sym2.diag(1.0, -1.0))
PARAMS = [(N, lam) for N in (4, 6, 8) for lam in (0.5, 1.0, 2.0, 10.0)]


class TestParams:

    @pytest.mark.parametrize('N', [3, 2, 4.5])
    def test_exponent_at_least_four(self, N):
        with pytest.raises(ValueError):
            NortonHoffParams(N, 1.0)

    def test_positive_lambda(self):
        with pytest.raises(ValueError):
            TruncationParams.create(4, 1.0, 0.0)

    def test_derived_constants(self):
        P = TruncationParams.create(6, 2.0, 3.0)
        assert P.N == 6 and P.alpha0 == 2.0
        np.testing.assert_allclose(P.cap_factor, 3.0**4 / 2.0**5)
        np.testing.assert_allclose(P.dual_threshold, 1.5**5)


class TestNortonHoff:

    def test_known_values(self):
        np.testing.assert_allclose(
            phi_N(PURE_SHEAR, NortonHoffParams(4, 1.0)), 1.0)
        np.testing.assert_allclose(
            phi_N(PURE_SHEAR, NortonHoffParams(4, 2.0)), 1.0 / 8.0)

    def test_gradient_matches_finite_differences(self, rng):
        P = NortonHoffParams(6, 1.3)
        xi = random_sym2(rng, 20)
        h = 1e-6
        grad = dphi_N(xi, P)
        for c, weight in enumerate((1.0, 1.0, 2.0)):
            e = np.zeros(3)
            e[c] = h
            fd = (phi_N(xi + e, P) - phi_N(xi - e, P)) / (2 * h)
            np.testing.assert_allclose(fd, weight * grad[:, c], rtol=1e-6,
                                       atol=1e-8)


class TestTruncation:

    def test_known_values(self):
        np.testing.assert_allclose(
            psi_lambda(PURE_SHEAR, TruncationParams.create(4, 1.0, 1.0)),
            0.75)
        np.testing.assert_allclose(
            psi_lambda(PURE_SHEAR, TruncationParams.create(4, 1.0, 2.0)),
            1.0)
        np.testing.assert_allclose(
            dpsi_lambda(PURE_SHEAR, TruncationParams.create(4, 1.0, 1.0)),
            PURE_SHEAR)

    @pytest.mark.parametrize('N,lam', PARAMS)
    def test_agrees_with_norton_hoff_below_lambda(self, rng, N, lam):
        P = TruncationParams.create(N, 1.0, lam)
        xi = random_sym2(rng, 200)
        xi *= (0.9 * lam / norm_r(xi))[:, None]
        np.testing.assert_allclose(psi_lambda(xi, P), phi_N(xi, P.base),
                                   rtol=1e-12)

    @pytest.mark.parametrize('N,lam', PARAMS)
    def test_monotone_gradient(self, rng, N, lam):
        P = TruncationParams.create(N, 1.0, lam)
        xi, eta = random_sym2(rng, 500, 2.0), random_sym2(rng, 500, 2.0)
        gap = frobenius_inner(dpsi_lambda(xi, P) - dpsi_lambda(eta, P),
                              xi - eta)
        assert np.all(gap >= -1e-12)

    def test_flow_factor_is_capped(self):
        P = TruncationParams.create(6, 1.0, 1.5)
        np.testing.assert_allclose(flow_factor([3.0, 10.0], P), P.cap_factor)


class TestConjugate:

    def test_known_values(self):
        P = TruncationParams.create(4, 1.0, 1.0)
        np.testing.assert_allclose(F_lambda(PURE_SHEAR, P), 1.25)
        np.testing.assert_allclose(dF_lambda(PURE_SHEAR, P), PURE_SHEAR)

    def test_zero(self):
        P = TruncationParams.create(4, 1.0, 1.0)
        np.testing.assert_allclose(F_lambda(np.zeros(3), P), 0.0)
        np.testing.assert_allclose(dF_lambda(np.zeros(3), P), np.zeros(3))

    @pytest.mark.parametrize('N,lam', PARAMS)
    def test_fenchel_young_equality(self, rng, N, lam):
        P = TruncationParams.create(N, 1.0, lam)
        xi = random_sym2(rng, 300, 1.5)
        y = dpsi_lambda(xi, P)
        lhs = psi_lambda(xi, P) + F_lambda(y, P)
        rhs = frobenius_inner(xi, y)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize('N,lam', PARAMS)
    def test_fenchel_young_inequality(self, rng, N, lam):
        P = TruncationParams.create(N, 1.0, lam)
        xi, y = random_sym2(rng, 300, 1.5), random_sym2(rng, 300, 1.5)
        gap = psi_lambda(xi, P) + F_lambda(y, P) - frobenius_inner(xi, y)
        scale = 1.0 + np.abs(psi_lambda(xi, P)) + np.abs(F_lambda(y, P))
        assert np.all(gap >= -1e-12 * scale)

    @pytest.mark.parametrize('N,lam', PARAMS)
    def test_gradients_are_inverse(self, rng, N, lam):
        P = TruncationParams.create(N, 1.0, lam)
        xi = random_sym2(rng, 300, 1.5)
        np.testing.assert_allclose(
            dF_lambda(dpsi_lambda(xi, P), P), xi, rtol=1e-9, atol=1e-10)
        y = random_sym2(rng, 300, 1.5)
        np.testing.assert_allclose(
            dpsi_lambda(dF_lambda(y, P), P), y, rtol=1e-9, atol=1e-10)

    @pytest.mark.parametrize('N', [4, 6, 8])
    def test_growth_bound_below_threshold(self, rng, N):
        # below the switch F_λ is the Norton–Hoff conjugate
        # α₀ (N−1)/N |y|_*^{N/(N−1)}
        P = TruncationParams.create(N, 1.0, 10.0)
        y = random_sym2(rng, 200)
        t = norm_dual(y)
        np.testing.assert_allclose(
            F_lambda(y, P), (N - 1) / N * t**(N / (N - 1)), rtol=1e-12)

    @pytest.mark.parametrize('N,lam', [(4, 0.5), (6, 1.0), (8, 2.0)])
    def test_closed_form_matches_brute_force(self, rng, N, lam):
        P = TruncationParams.create(N, 1.0, lam)
        for y in random_sym2(rng, 3):
            np.testing.assert_allclose(
                conjugate_sup(y, P), F_lambda(y, P), rtol=1e-4, atol=1e-8)


def test_conjugate_numeric_agrees_with_closed_form():
    from plastiplate.ops.potentials import conjugate_numeric
    P = TruncationParams.create(6, 1.0, 2.0)
    y = np.array([0.4, -0.2, 0.1])
    assert conjugate_numeric(y, P) == pytest.approx(F_lambda(y, P), rel=1e-4)
