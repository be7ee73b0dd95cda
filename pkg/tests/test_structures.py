import numpy as np
import pytest

from plastiplate.structures import (KLDisplacement, LayeredField, PlateGrid,
                                    Trajectory, check_layer_rule,
                                    gauss_layers, make_state)


class TestPlateGrid:

    def test_shapes(self, grid):
        assert grid.shape == (5, 7)
        assert grid.num_nodes == 35
        assert grid.layered_shape == (5, 7, 4, 3)
        np.testing.assert_allclose(grid.node_weights.sum(), 1.0)

    @pytest.mark.parametrize('layers', range(2, 9))
    def test_gauss_layers_integrate_moments(self, layers):
        x3, w = gauss_layers(layers)
        check_layer_rule(x3, w)
        np.testing.assert_allclose(np.sum(w * x3), 0.0, atol=1e-15)

    def test_explicit_layers(self):
        a = 0.5 / np.sqrt(3.0)
        grid = PlateGrid(layers=[(-a, 0.5), (a, 0.5)])
        assert grid.num_layers == 2

    @pytest.mark.parametrize('layers', [
        [(-0.25, 0.5), (0.25, 0.5)],
        [(-0.5, 0.5), (0.5, 0.5)],
        [(0.0, 1.0)],
    ])
    def test_rejects_bad_layer_rule(self, layers):
        with pytest.raises(ValueError):
            PlateGrid(layers=layers)

    def test_rejects_small_grid_and_unknown_edge(self):
        with pytest.raises(ValueError):
            PlateGrid(nx=2)
        with pytest.raises(ValueError):
            PlateGrid(dirichlet_edges=('front', ))
        with pytest.raises(ValueError):
            PlateGrid(dirichlet_edges=())

    def test_fixed_dofs_clamp_the_slope(self):
        grid = PlateGrid(nx=5, ny=4, dirichlet_edges=('left', ))
        n = grid.num_nodes
        fixed = grid.fixed_dofs
        u1 = fixed[:n].reshape(grid.shape)
        u3 = fixed[2 * n:].reshape(grid.shape)
        assert u1[:, 0].all() and not u1[:, 1:].any()
        assert u3[:, :2].all() and not u3[:, 2:].any()
        assert grid.free_dofs.size == 3 * n - 2 * 4 - 2 * 4

    def test_refined_contains_coarse_nodes(self, grid):
        fine = grid.refined(2)
        assert fine.shape == (9, 13)
        X, Y = grid.coordinates
        Xf, Yf = fine.coordinates
        np.testing.assert_allclose(Xf[::2, ::2], X)
        np.testing.assert_allclose(Yf[::2, ::2], Y)
        np.testing.assert_allclose(fine.x3, grid.x3)

    def test_interior_mask(self, grid):
        mask = grid.interior_mask(1)
        assert mask.sum() == 3 * 5
        assert not grid.interior_mask(3).any()


class TestFields:

    def test_layered_field_points(self, grid, rng):
        values = rng.standard_normal(grid.layered_shape)
        f = LayeredField(values=values)
        points = f.to_points()
        assert points.shape == (grid.num_layers, grid.num_nodes, 3)
        back = LayeredField.from_points(points, grid.ny, grid.nx)
        np.testing.assert_array_equal(back.values, values)

    def test_layered_field_rejects_bad_values(self):
        with pytest.raises(AssertionError):
            LayeredField(values=np.zeros((3, 3, 2)))
        with pytest.raises(AssertionError):
            LayeredField(values=np.full((3, 3, 2, 3), np.nan))

    def test_displacement_vector_layout(self, grid, rng):
        u = KLDisplacement(
            ubar=rng.standard_normal(grid.shape + (2, )),
            u3=rng.standard_normal(grid.shape))
        vec = u.to_vector()
        n = grid.num_nodes
        np.testing.assert_array_equal(vec[:n], u.ubar[..., 0].ravel())
        np.testing.assert_array_equal(vec[2 * n:], u.u3.ravel())
        back = KLDisplacement.from_vector(vec, grid.shape)
        np.testing.assert_array_equal(back.ubar, u.ubar)

    def test_displacement_arithmetic(self, grid):
        a = KLDisplacement.zeros(grid)
        a.u3 = np.ones(grid.shape)
        b = 2.0 * a - a
        np.testing.assert_array_equal(b.u3, a.u3)
        c = a.clone()
        c.u3[0, 0] = 5.0
        assert a.u3[0, 0] == 1.0

    def test_displacement_3d(self, grid):
        X, _ = grid.coordinates
        u = KLDisplacement(ubar=np.zeros(grid.shape + (2, )), u3=X)
        full = u.displacement_3d(grid)
        assert full.shape == (5, 7, 4, 3)
        np.testing.assert_allclose(full[..., 0],
                                   -np.broadcast_to(grid.x3, (5, 7, 4)),
                                   atol=1e-12)
        np.testing.assert_allclose(full[..., 2],
                                   np.broadcast_to(X[..., None], (5, 7, 4)))


class TestTrajectory:

    @staticmethod
    def _state(grid, step):
        zeros = np.zeros(grid.layered_shape)
        return make_state(step, 0.1 * step, KLDisplacement.zeros(grid), zeros,
                          zeros, zeros, np.zeros(grid.shape),
                          np.zeros(grid.shape), np.zeros(grid.shape))

    def test_stride_keeps_last(self, grid):
        traj = Trajectory(stride=3)
        for i in range(8):
            traj.keep(self._state(grid, i), last=i == 7)
        assert traj.steps == [0, 3, 6, 7]
        assert not traj.is_dense
        assert traj.final.step == 7
        assert traj.at_step(3).time == pytest.approx(0.3)
        assert traj.at_step(4) is None

    def test_dense(self, grid):
        traj = Trajectory()
        for i in range(3):
            traj.keep(self._state(grid, i))
        assert traj.is_dense and len(traj) == 3
        assert not traj.keep(self._state(grid, 2), last=True)


class TestBaseDataElement:

    def test_metainfo_is_read_only(self):
        from plastiplate.structures import BaseDataElement
        elem = BaseDataElement(metainfo=dict(step=3), u3=np.zeros((2, 2)))
        assert elem.step == 3 and elem.metainfo == dict(step=3)
        assert elem.keys() == ['u3'] and 'step' in elem
        with pytest.raises(AttributeError):
            elem.step = 4
        with pytest.raises(AttributeError):
            elem._data_fields = set()
        copy = elem.clone()
        copy.u3[0, 0] = 1.0
        assert elem.u3[0, 0] == 0.0 and copy.step == 3
        assert 'step: 3' in repr(elem)
