import numpy as np
import pytest

from plastiplate.ops.kinematics import (divdiv, divergence, from_moments,
                                        hessian, kl_strain, moment_first,
                                        moment_zero, perp_part, sym_grad)
from plastiplate.ops.sym2 import frobenius_inner, random_sym2
from plastiplate.structures import KLDisplacement, PlateGrid


def _affine_displacement(grid):
    X, Y = grid.coordinates
    ubar = np.stack([0.3 * X + 0.1 * Y, -0.2 * Y + 0.5 * X], axis=-1)
    u3 = 0.5 * X**2 - 0.25 * X * Y + Y**2
    return KLDisplacement(ubar=ubar, u3=u3)


class TestStrains:

    def test_exact_on_polynomials(self, grid):
        strain = kl_strain(_affine_displacement(grid), grid)
        # Eū = (0.3, -0.2, 0.3) and D²u₃ = (1, 2, -0.25) everywhere
        expected = (np.array([0.3, -0.2, 0.3])[None, None, None, :] -
                    grid.x3[None, None, :, None] *
                    np.array([1.0, 2.0, -0.25])[None, None, None, :])
        np.testing.assert_allclose(
            strain.values, np.broadcast_to(expected, grid.layered_shape),
            atol=1e-12)

    def test_operator_matches_field_strain(self, grid, rng):
        u = KLDisplacement(
            ubar=rng.standard_normal(grid.shape + (2, )),
            u3=rng.standard_normal(grid.shape))
        points = grid.operators.layer_strains(u.to_vector())
        np.testing.assert_allclose(points,
                                   kl_strain(u, grid).to_points(),
                                   atol=1e-12)

    def test_rigid_motion_is_strain_free(self, grid):
        X, Y = grid.coordinates
        ubar = np.stack([-0.4 * Y + 1.0, 0.4 * X], axis=-1)
        u3 = 0.2 + 0.3 * X - 0.1 * Y
        strain = kl_strain(KLDisplacement(ubar=ubar, u3=u3), grid)
        np.testing.assert_allclose(strain.values, 0.0, atol=1e-12)

    def test_rejects_wrong_shape(self, grid):
        with pytest.raises(ValueError):
            sym_grad(np.zeros((3, 3, 2)), grid)


class TestMoments:

    @pytest.mark.parametrize('layers', [2, 3, 4, 5])
    def test_affine_fields_round_trip(self, rng, layers):
        grid = PlateGrid(1.0, 1.0, 3, 4, layers)
        bar = random_sym2(rng, grid.shape)
        hat = random_sym2(rng, grid.shape)
        f = from_moments(bar, hat, grid)
        np.testing.assert_allclose(moment_zero(f, grid), bar, atol=1e-13)
        np.testing.assert_allclose(moment_first(f, grid), hat, atol=1e-12)
        np.testing.assert_allclose(perp_part(f, grid).values, 0.0,
                                   atol=1e-12)

    def test_perp_part_has_no_moments(self, grid, rng):
        f = random_sym2(rng, grid.layered_shape[:3])
        perp = perp_part(f, grid)
        np.testing.assert_allclose(moment_zero(perp, grid), 0.0, atol=1e-12)
        np.testing.assert_allclose(moment_first(perp, grid), 0.0, atol=1e-12)

    def test_orthogonal_split_of_energy(self, grid, rng):
        # ∫ f:g = f̄:ḡ + f̂:ĝ/12 + ∫ f⊥:g⊥ at every node
        f = random_sym2(rng, grid.layered_shape[:3])
        g = random_sym2(rng, grid.layered_shape[:3])
        w = grid.layer_weights
        total = np.einsum('l,yxl->yx', w, frobenius_inner(f, g))
        split = (frobenius_inner(moment_zero(f, grid), moment_zero(g, grid)) +
                 frobenius_inner(moment_first(f, grid), moment_first(
                     g, grid)) / 12.0 +
                 np.einsum('l,yxl->yx', w,
                           frobenius_inner(
                               perp_part(f, grid).values,
                               perp_part(g, grid).values)))
        np.testing.assert_allclose(total, split, atol=1e-12)


class TestDivergences:

    def test_weak_divergence_is_adjoint(self, grid, rng):
        op = grid.operators
        sbar = random_sym2(rng, grid.shape)
        ubar = rng.standard_normal(grid.shape + (2, ))
        W = grid.node_weights
        lhs = np.sum(W[..., None] * -op.weak_divergence(sbar) * ubar)
        rhs = np.sum(W * frobenius_inner(sbar, sym_grad(ubar, grid)))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    def test_weak_divdiv_is_adjoint(self, grid, rng):
        op = grid.operators
        shat = random_sym2(rng, grid.shape)
        u3 = rng.standard_normal(grid.shape)
        W = grid.node_weights
        lhs = np.sum(W * op.weak_divdiv(shat) * u3)
        rhs = np.sum(W * frobenius_inner(shat, hessian(u3, grid)))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    def test_strong_operators_on_polynomials(self):
        grid = PlateGrid(2.0, 1.0, 9, 7, 2)
        X, Y = grid.coordinates
        s = np.stack([X**2, Y**2, X * Y], axis=-1)
        np.testing.assert_allclose(
            divergence(s, grid),
            np.stack([2 * X + X, Y + 2 * Y], axis=-1),
            atol=1e-11)
        np.testing.assert_allclose(divdiv(s, grid), 2.0 + 2.0 + 2.0,
                                   atol=1e-9)

    def test_internal_force_is_pairing_gradient(self, grid, rng):
        op = grid.operators
        stress = random_sym2(rng, (grid.num_layers, grid.num_nodes))
        U = rng.standard_normal(3 * grid.num_nodes)
        np.testing.assert_allclose(
            op.internal_force(stress) @ U,
            op.pairing(stress, op.layer_strains(U)),
            rtol=1e-12)
