"""Pointwise implicit constitutive update.

Given η = Eu − p_prev, solve A_r σ + δ Dψ_λ(σ) = η for σ. Splitting
σ = D + (t/2) I (D trace-free, t = tr σ) and using
Dψ_λ(σ) = c(s)(D + (t/6) I) with s = |σ|_r decouples the system into

    (a + δc) D = η_D,      (b + δc/3) t = tr η,

a = 1/(2μ), b = 1/(2μ+2ℓ), so only the scalar s is unknown:

    s² = |η_D|² / (a + δc(s))² + (tr η)² / (6 (b + δc(s)/3)²).

The right side is non-increasing in s, the root is unique and bracketed by
[0, s_el] with s_el the elastic trial modulus.
"""
from typing import Tuple, Union

import numpy as np

from plastiplate.ops.potentials import (F_lambda, TruncationParams,
                                        dpsi_lambda, flow_factor,
                                        flow_factor_slope)
from plastiplate.ops.sym2 import (IDENTITY, ArrayLike, as_sym2, dev_r,
                                  frobenius_inner, frobenius_norm, to_mandel)
from plastiplate.utils import ReturnMapError, TimeCounter
from .elasticity import Elasticity, apply_A

_PROJ_M = np.eye(3) - np.outer(IDENTITY, IDENTITY) / 3.0


def _solve_modulus(X: np.ndarray, Y: np.ndarray, s_el: np.ndarray, dt: float,
                   E: Elasticity, P: TruncationParams, max_iter: int):
    """Safeguarded Newton for φ(s) = s − √R(s) = 0 on [0, s_el]."""
    a, b = E.deviatoric_compliance, E.trace_compliance
    lo = np.zeros_like(s_el)
    hi = s_el.copy()
    s = s_el.copy()
    scale = 1.0 + s_el
    active = s_el > 0
    phi = np.zeros_like(s)
    for _ in range(max_iter):
        if not active.any():
            break
        sa = s[active]
        c = flow_factor(sa, P)
        dev_den = a + dt * c
        tr_den = b + dt * c / 3.0
        R = X[active] / dev_den**2 + Y[active] / tr_den**2
        root = np.sqrt(R)
        phi_a = sa - root
        phi[active] = phi_a

        dc = sa * flow_factor_slope(sa, P)
        dR = -2.0 * dt * dc * (X[active] / dev_den**3 +
                               Y[active] / (3.0 * tr_den**3))
        dphi = 1.0 - np.where(root > 0, dR / (2.0 * np.where(
            root > 0, root, 1.0)), 0.0)

        lo_a, hi_a = lo[active], hi[active]
        hi_a = np.where(phi_a > 0, sa, hi_a)
        lo_a = np.where(phi_a <= 0, sa, lo_a)
        step = sa - phi_a / dphi
        outside = (step <= lo_a) | (step >= hi_a)
        step = np.where(outside, 0.5 * (lo_a + hi_a), step)

        done = (np.abs(phi_a) <= 4e-16 * scale[active]) | \
            (hi_a - lo_a <= 4e-16 * scale[active])
        s_new = np.where(done, sa, step)

        idx = np.flatnonzero(active)
        s[idx], lo[idx], hi[idx] = s_new, lo_a, hi_a
        active[idx[done]] = False
    return s, phi


@TimeCounter.count_time('return_map')
def return_map(eta: ArrayLike,
               dt: float,
               E: Elasticity,
               P: TruncationParams,
               tol: float = 1e-12,
               max_iter: int = 100,
               tangent: bool = False
               ) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """Solve A_r σ + dt·Dψ_λ(σ) = η pointwise.

    Args:
        eta (ArrayLike): Sym2 value(s), shape (..., 3).
        dt (float): Time step δ > 0.
        E (Elasticity): Elastic moduli.
        P (TruncationParams): Potential parameters.
        tol (float): Relative tolerance on the Frobenius residual,
            |residual| ≤ tol·(1 + |η|).
        max_iter (int): Cap on the scalar iterations.
        tangent (bool): Also return the consistent tangent dσ/dη in Mandel
            coordinates, shape (..., 3, 3).

    Returns:
        np.ndarray | Tuple[np.ndarray, np.ndarray]: σ, and the tangent when
        requested.
    """
    assert dt > 0, f'dt must be positive, got {dt}'
    assert tol > 0, f'tol must be positive, got {tol}'
    eta = as_sym2(eta)
    batch = eta.shape[:-1]
    flat = eta.reshape(-1, 3)

    a, b = E.deviatoric_compliance, E.trace_compliance
    tau = flat[:, 0] + flat[:, 1]
    eta_dev = flat - (0.5 * tau)[:, None] * IDENTITY
    X = frobenius_inner(eta_dev, eta_dev)
    Y = tau * tau / 6.0
    s_el = np.sqrt(X / a**2 + Y / b**2)

    s, _ = _solve_modulus(X, Y, s_el, dt, E, P, max_iter)
    c = flow_factor(s, P)
    dev_part = eta_dev / (a + dt * c)[:, None]
    tr_part = tau / (b + dt * c / 3.0)
    sigma = dev_part + (0.5 * tr_part)[:, None] * IDENTITY

    residual = frobenius_norm(
        apply_A(sigma, E) + dt * dpsi_lambda(sigma, P) - flat)
    bound = tol * (1.0 + frobenius_norm(flat))
    if np.any(residual > bound):
        worst = int(np.argmax(residual / bound))
        raise ReturnMapError(
            f'return map did not converge at point {worst} of {len(flat)}',
            float(residual[worst]))

    sigma = sigma.reshape(batch + (3, ))
    if not tangent:
        return sigma
    return sigma, consistent_tangent(
        sigma.reshape(-1, 3), s, dt, E, P).reshape(batch + (3, 3))


def consistent_tangent(sigma: np.ndarray, s: np.ndarray, dt: float,
                       E: Elasticity, P: TruncationParams) -> np.ndarray:
    """dσ/dη in Mandel coordinates at converged stresses (n, 3).

    Differentiating A_r σ + δ c(s) dev_r σ = η gives
    J dσ = dη with J = A + δc·P + δ(c′/s)(P σ)(P σ)ᵀ, P the Mandel matrix
    of dev_r; the tangent is J⁻¹ (symmetric positive definite).
    """
    c = flow_factor(s, P)
    q = flow_factor_slope(s, P)
    pm = to_mandel(dev_r(sigma))
    J = (E.mandel_compliance()[None] + dt * c[:, None, None] * _PROJ_M[None] +
         dt * q[:, None, None] * np.einsum('ni,nj->nij', pm, pm))
    return np.linalg.inv(J)


def elastic_tangent(E: Elasticity, shape=()) -> np.ndarray:
    """C_r in Mandel coordinates, broadcast to ``shape + (3, 3)``."""
    return np.broadcast_to(E.mandel_stiffness(), tuple(shape) + (3, 3)).copy()


def plastic_increment(sigma: ArrayLike, dt: float,
                      P: TruncationParams) -> np.ndarray:
    """p − p_prev = δ Dψ_λ(σ)."""
    return dt * dpsi_lambda(sigma, P)


def incremental_energy_density(eta: ArrayLike, sigma: ArrayLike, dt: float,
                               E: Elasticity,
                               P: TruncationParams) -> np.ndarray:
    """½ A_r σ:σ + δ F_λ(Δp/δ) with Δp = η − A_r σ.

    At σ = return_map(η) this is the minimum over the plastic increment of
    the pointwise incremental energy, and its η-gradient is σ.
    """
    a_sigma = apply_A(sigma, E)
    dp = as_sym2(eta) - a_sigma
    return 0.5 * frobenius_inner(a_sigma, sigma) + dt * F_lambda(dp / dt, P)
