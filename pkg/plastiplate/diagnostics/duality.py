"""Discrete check of the stress–strain integration by parts formula.

For a state (u, e, p) with boundary datum w, z = u − w, a stress σ and a
cutoff φ,

    ∫ φ d[σ:p]_r + ∫ φ σ:(e − Ew)
        = −∫ σ̄:(∇φ ⊙ z̄) − ∫ Div σ̄·φ z̄ + (1/12) ∫ σ̂: z₃ D²φ
          + (1/6) ∫ σ̂:(∇φ ⊙ ∇z₃) − (1/12) ∫ φ z₃ DivDiv σ̂.

For grid fields the measure [σ:p]_r has the density
σ̄:p̄ + σ̂:p̂/12 − ∫σ_⊥:e_⊥ dx₃, which equals ∫σ:p dx₃ on Kirchhoff–Love
states, so the left side is also ∫ φ σ:E z. Both sides apply the same
second-order stencils to the state and the same trapezoid weights, and the
cutoff derivatives are exact, so the residual decays at second order.
"""
from typing import TYPE_CHECKING, NamedTuple, Optional, Tuple

import numpy as np

from plastiplate.ops.kinematics import (divdiv, divergence, gradient,
                                        kl_strain, moment_first, moment_zero,
                                        perp_part)
from plastiplate.ops.sym2 import frobenius_inner
from plastiplate.structures import KLDisplacement, PlateGrid, PlateState
from .monitor import integrate_layered, integrate_nodal

if TYPE_CHECKING:
    from plastiplate.solver.scenario import Scenario

CUTOFFS = ('bump', 'ones')


class DualityResult(NamedTuple):
    lhs: float
    lhs_moments: float
    rhs: float
    residual: float
    scale: float


def cutoff_function(
        grid: PlateGrid,
        kind: str = 'bump') -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """φ with its gradient (ny, nx, 2) and Hessian (ny, nx, 3).

    ``'bump'`` is s⁴ with s = sin(πx/Lx) sin(πy/Ly), which vanishes together
    with its first three derivatives on ∂ω; ``'ones'`` is φ ≡ 1. The
    derivatives are exact, so only the stencils applied to the state enter
    the residual.
    """
    assert kind in CUTOFFS, f'cutoff must be one of {CUTOFFS}, got {kind}'
    if kind == 'ones':
        return (np.ones(grid.shape), np.zeros(grid.shape + (2, )),
                np.zeros(grid.shape + (3, )))
    X, Y = grid.coordinates
    kx, ky = np.pi / grid.Lx, np.pi / grid.Ly
    sx, cx = np.sin(kx * X), np.cos(kx * X)
    sy, cy = np.sin(ky * Y), np.cos(ky * Y)
    s = sx * sy
    s_x, s_y = kx * cx * sy, ky * sx * cy
    s_xx, s_yy, s_xy = -kx * kx * s, -ky * ky * s, kx * ky * cx * cy
    phi = s**4
    dphi = np.stack([4.0 * s**3 * s_x, 4.0 * s**3 * s_y], axis=-1)
    d2phi = np.stack([
        12.0 * s**2 * s_x * s_x + 4.0 * s**3 * s_xx,
        12.0 * s**2 * s_y * s_y + 4.0 * s**3 * s_yy,
        12.0 * s**2 * s_x * s_y + 4.0 * s**3 * s_xy
    ],
                     axis=-1)
    return phi, dphi, d2phi


def sym_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a ⊙ b for fields of 2-vectors, as Sym2."""
    return np.stack([
        a[..., 0] * b[..., 0], a[..., 1] * b[..., 1],
        0.5 * (a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0])
    ],
                    axis=-1)


def duality_pairing_density(sigma: np.ndarray, p: np.ndarray, e: np.ndarray,
                            grid: PlateGrid) -> np.ndarray:
    """Nodal density σ̄:p̄ + σ̂:p̂/12 − ∫σ_⊥:e_⊥ dx₃ of [σ:p]_r."""
    bar = frobenius_inner(moment_zero(sigma, grid), moment_zero(p, grid))
    hat = frobenius_inner(moment_first(sigma, grid), moment_first(p, grid))
    perp = frobenius_inner(
        perp_part(sigma, grid).values,
        perp_part(e, grid).values)
    return bar + hat / 12.0 - np.einsum('l,yxl->yx', grid.layer_weights, perp)


def duality_identity(sigma: np.ndarray,
                     u: KLDisplacement,
                     e: np.ndarray,
                     p: np.ndarray,
                     w: KLDisplacement,
                     grid: PlateGrid,
                     cutoff: str = 'bump') -> DualityResult:
    """Both sides of the integration by parts formula for given fields."""
    phi, dphi, d2phi = cutoff_function(grid, cutoff)
    z = u - w
    strain_w = kl_strain(w, grid).values
    lhs_moments = integrate_nodal(
        phi * duality_pairing_density(sigma, p, e, grid), grid) + \
        integrate_layered(phi[..., None] * frobenius_inner(
            sigma, e - strain_w), grid)
    lhs = integrate_layered(
        phi[..., None] * frobenius_inner(sigma,
                                         kl_strain(z, grid).values), grid)

    sbar, shat = moment_zero(sigma, grid), moment_first(sigma, grid)
    dz3 = gradient(z.u3, grid)
    rhs = (
        -integrate_nodal(frobenius_inner(sbar, sym_product(dphi, z.ubar)),
                         grid) -
        integrate_nodal(phi * np.sum(divergence(sbar, grid) * z.ubar, -1),
                        grid) +
        integrate_nodal(z.u3 * frobenius_inner(shat, d2phi), grid) / 12.0 +
        integrate_nodal(frobenius_inner(shat, sym_product(dphi, dz3)),
                        grid) / 6.0 -
        integrate_nodal(phi * z.u3 * divdiv(shat, grid), grid) / 12.0)
    scale = 1.0 + abs(lhs) + abs(rhs)
    return DualityResult(lhs, lhs_moments, rhs, abs(lhs - rhs), scale)


def duality_residual(state: PlateState,
                     S: 'Scenario',
                     cutoff: str = 'bump',
                     w: Optional[KLDisplacement] = None) -> DualityResult:
    """Integration by parts residual of a converged state."""
    if w is None:
        w = S.w_at(int(state.step))
    return duality_identity(state.sigma.values, state.u, state.e.values,
                            state.p.values, w, S.grid, cutoff)
