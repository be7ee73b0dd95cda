"""Kirchhoff–Love kinematics, thickness moments and discrete divergences.

ω-fields of Sym2 values have shape (ny, nx, 3); layered fields are
:class:`LayeredField` with values of shape (ny, nx, layers, 3).
"""
from typing import Union

import numpy as np
import scipy.sparse as sp

from plastiplate.structures import KLDisplacement, LayeredField, PlateGrid
from .sym2 import from_mandel, to_mandel

Layered = Union[LayeredField, np.ndarray]

SQRT2 = np.sqrt(2.0)


def _check_shape(arr: np.ndarray, shape: tuple, name: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.shape != tuple(shape):
        raise ValueError(f'{name} has shape {arr.shape}, expected {shape}')
    return arr


def _layered_values(f: Layered, grid: PlateGrid) -> np.ndarray:
    values = f.values if isinstance(f, LayeredField) else f
    return _check_shape(values, grid.layered_shape, 'layered field')


def sym_grad(ubar: np.ndarray, grid: PlateGrid) -> np.ndarray:
    """Symmetric gradient Eū as an ω-field of Sym2."""
    ubar = _check_shape(ubar, grid.shape + (2, ), 'ubar')
    d = grid.differences
    d1u1 = d.apply(d.Dx, ubar[..., 0])
    d2u2 = d.apply(d.Dy, ubar[..., 1])
    shear = 0.5 * (d.apply(d.Dy, ubar[..., 0]) + d.apply(d.Dx, ubar[..., 1]))
    return np.stack([d1u1, d2u2, shear], axis=-1)


def hessian(u3: np.ndarray, grid: PlateGrid) -> np.ndarray:
    """D²u₃ as an ω-field of Sym2."""
    u3 = _check_shape(u3, grid.shape, 'u3')
    d = grid.differences
    return np.stack(
        [d.apply(d.Dxx, u3), d.apply(d.Dyy, u3), d.apply(d.Dxy, u3)], axis=-1)


def gradient(u3: np.ndarray, grid: PlateGrid) -> np.ndarray:
    u3 = _check_shape(u3, grid.shape, 'u3')
    d = grid.differences
    return np.stack([d.apply(d.Dx, u3), d.apply(d.Dy, u3)], axis=-1)


def kl_strain(u: KLDisplacement, grid: PlateGrid) -> LayeredField:
    """Eu(x′, x₃) = Eū(x′) − x₃ D²u₃(x′) at every layer."""
    membrane = sym_grad(u.ubar, grid)
    bending = hessian(u.u3, grid)
    x3 = grid.x3[None, None, :, None]
    return LayeredField(
        values=membrane[:, :, None, :] - x3 * bending[:, :, None, :])


def moment_zero(f: Layered, grid: PlateGrid) -> np.ndarray:
    """f̄ = ∫ f dx₃."""
    values = _layered_values(f, grid)
    return np.einsum('l,yxlc->yxc', grid.layer_weights, values)


def moment_first(f: Layered, grid: PlateGrid) -> np.ndarray:
    """f̂ = 12 ∫ x₃ f dx₃."""
    values = _layered_values(f, grid)
    return 12.0 * np.einsum('l,yxlc->yxc', grid.layer_weights * grid.x3,
                            values)


def perp_part(f: Layered, grid: PlateGrid) -> LayeredField:
    """f_⊥ = f − f̄ − x₃ f̂."""
    values = _layered_values(f, grid)
    bar, hat = moment_zero(values, grid), moment_first(values, grid)
    x3 = grid.x3[None, None, :, None]
    return LayeredField(
        values=values - bar[:, :, None, :] - x3 * hat[:, :, None, :])


def from_moments(bar: np.ndarray, hat: np.ndarray,
                 grid: PlateGrid) -> LayeredField:
    """The field f̄ + x₃ f̂, affine in x₃."""
    x3 = grid.x3[None, None, :, None]
    return LayeredField(values=bar[:, :, None, :] + x3 * hat[:, :, None, :])


def divergence(s: np.ndarray, grid: PlateGrid) -> np.ndarray:
    """Strong finite-difference Div of a Sym2 ω-field, shape (ny, nx, 2)."""
    s = _check_shape(s, grid.shape + (3, ), 'Sym2 field')
    d = grid.differences
    return np.stack([
        d.apply(d.Dx, s[..., 0]) + d.apply(d.Dy, s[..., 2]),
        d.apply(d.Dx, s[..., 2]) + d.apply(d.Dy, s[..., 1])
    ],
                    axis=-1)


def divdiv(s: np.ndarray, grid: PlateGrid) -> np.ndarray:
    """Strong finite-difference Div Div of a Sym2 ω-field."""
    s = _check_shape(s, grid.shape + (3, ), 'Sym2 field')
    d = grid.differences
    return (d.apply(d.Dxx, s[..., 0]) + 2.0 * d.apply(d.Dxy, s[..., 2]) +
            d.apply(d.Dyy, s[..., 1]))


def points_to_flat(points: np.ndarray) -> np.ndarray:
    """(nodes, 3) → component-major flat vector of length 3·nodes."""
    return np.ascontiguousarray(points.T).reshape(-1)


def flat_to_points(flat: np.ndarray) -> np.ndarray:
    return flat.reshape(3, -1).T


class StrainOperator:
    """Assembled layer strain map U ↦ Eu at one thickness node, in Mandel
    coordinates.

    U is the flat (u1, u2, u3) vector of :meth:`KLDisplacement.to_vector`.
    The strain at layer x₃ is ``(G − x₃ H) U`` with G the membrane and H the
    bending part. The discrete energy pairing of a stress σ with Eu is

        Σ_ℓ w_ℓ Σ_nodes W · σ_ℓ:(Eu)_ℓ,

    W being the trapezoid weight of a node, so the internal force is the
    transpose of the strain map against those weights.
    """

    def __init__(self, grid: PlateGrid):
        self.grid = grid
        d = grid.differences
        n = grid.num_nodes
        zero = sp.csr_matrix((n, n))
        half = 0.5 * SQRT2
        self.G = sp.bmat([[d.Dx, zero, zero], [zero, d.Dy, zero],
                          [half * d.Dy, half * d.Dx, zero]],
                         format='csr')
        self.H = sp.bmat([[zero, zero, d.Dxx], [zero, zero, d.Dyy],
                          [zero, zero, SQRT2 * d.Dxy]],
                         format='csr')
        self.weights = d.weights
        self.weights3 = np.tile(d.weights, 3)
        self.x3 = grid.x3
        self.layer_weights = grid.layer_weights

    @property
    def num_nodes(self) -> int:
        return self.grid.num_nodes

    def layer_strains(self, U: np.ndarray) -> np.ndarray:
        """Strains of all layers as (layers, nodes, 3) in (a11, a22, a12)."""
        membrane = flat_to_points(self.G @ U)
        bending = flat_to_points(self.H @ U)
        strains_m = membrane[None] - self.x3[:, None, None] * bending[None]
        return from_mandel(strains_m)

    def _moments_flat(self, points: np.ndarray):
        """Weighted layer sums Σ w_ℓ x₃^q σ_ℓ (q = 0, 1), Mandel, flat."""
        points_m = to_mandel(points)
        bar = np.einsum('l,lnc->nc', self.layer_weights, points_m)
        first = np.einsum('l,lnc->nc', self.layer_weights * self.x3, points_m)
        return points_to_flat(bar), points_to_flat(first)

    def internal_force(self, stress_points: np.ndarray) -> np.ndarray:
        """Σ_ℓ w_ℓ B_ℓᵀ W σ_ℓ for stresses given as (layers, nodes, 3)."""
        bar, first = self._moments_flat(stress_points)
        return (self.G.T @ (self.weights3 * bar) -
                self.H.T @ (self.weights3 * first))

    def pairing(self, stress_points: np.ndarray,
                strain_points: np.ndarray) -> float:
        """Σ_ℓ w_ℓ Σ_nodes W σ_ℓ:ε_ℓ."""
        from .sym2 import frobenius_inner
        dens = frobenius_inner(stress_points, strain_points)
        return float(
            np.einsum('l,ln,n->', self.layer_weights, dens, self.weights))

    def tangent(self, moduli_m: np.ndarray) -> sp.csr_matrix:
        """Σ_ℓ w_ℓ B_ℓᵀ W T_ℓ B_ℓ for Mandel moduli of shape
        (layers, nodes, 3, 3)."""
        blocks = []
        for q in range(3):
            coeff = self.layer_weights * self.x3**q
            tq = np.einsum('l,lnab->nab', coeff, moduli_m)
            blocks.append(
                sp.bmat([[
                    sp.diags(self.weights * tq[:, a, b]) for b in range(3)
                ] for a in range(3)],
                        format='csr'))
        k0, k1, k2 = blocks
        cross = self.G.T @ k1 @ self.H
        return (self.G.T @ k0 @ self.G - cross - cross.T +
                self.H.T @ k2 @ self.H).tocsr()

    def weak_divergence(self, sbar: np.ndarray) -> np.ndarray:
        """Div_h σ̄ such that ⟨−Div_h σ̄, v̄⟩_W = ⟨σ̄, Ev̄⟩_W for every v̄.

        Returns:
            np.ndarray: shape (ny, nx, 2).
        """
        sbar = _check_shape(sbar, self.grid.shape + (3, ), 'sbar')
        flat = points_to_flat(to_mandel(sbar.reshape(-1, 3)))
        force = self.G.T @ (self.weights3 * flat)
        n = self.num_nodes
        div = -np.stack([force[:n], force[n:2 * n]], axis=-1) / \
            self.weights[:, None]
        return div.reshape(self.grid.shape + (2, ))

    def weak_divdiv(self, shat: np.ndarray) -> np.ndarray:
        """DivDiv_h σ̂ such that ⟨DivDiv_h σ̂, v₃⟩_W = ⟨σ̂, D²v₃⟩_W."""
        shat = _check_shape(shat, self.grid.shape + (3, ), 'shat')
        flat = points_to_flat(to_mandel(shat.reshape(-1, 3)))
        force = self.H.T @ (self.weights3 * flat)
        n = self.num_nodes
        return (force[2 * n:] / self.weights).reshape(self.grid.shape)

    def loads_from_stress(self, stress: Layered):
        """The nodal loads (f, g) statically balanced by ``stress``.

        f = −Div_h σ̄ and g = −(1/12) DivDiv_h σ̂ hold exactly in the weak
        sense of the incremental problem.
        """
        bar = moment_zero(stress, self.grid)
        hat = moment_first(stress, self.grid)
        return -self.weak_divergence(bar), -self.weak_divdiv(hat) / 12.0
