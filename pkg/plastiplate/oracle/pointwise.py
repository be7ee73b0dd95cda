from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from plastiplate.material import Elasticity, apply_C
from plastiplate.ops.potentials import TruncationParams, F_lambda, dF_lambda
from plastiplate.ops.sym2 import FROBENIUS_WEIGHTS, ArrayLike, as_sym2, \
    frobenius_inner


class PointwiseUpdate(NamedTuple):
    p: np.ndarray
    sigma: np.ndarray
    energy: float
    iterations: int


def pointwise_plastic_update(strain: ArrayLike,
                             p_prev: ArrayLike,
                             dt: float,
                             E: Elasticity,
                             P: TruncationParams,
                             gtol: float = 1e-13) -> PointwiseUpdate:
    """Minimize ½ C_r(ε − p):(ε − p) + δ F_λ((p − p_prev)/δ) over p.

    Works on a single point with scipy's BFGS; the result is independent of
    the return map and is used to cross-check it.
    """
    eta = as_sym2(strain) - as_sym2(p_prev)
    assert eta.shape == (3, ), 'a single point is expected'

    # unknown: Δ = p − p_prev, in storage coordinates
    def energy(dp):
        elastic = eta - dp
        return float(0.5 * frobenius_inner(apply_C(elastic, E), elastic) +
                     dt * F_lambda(dp / dt, P))

    def jac(dp):
        grad = -apply_C(eta - dp, E) + dF_lambda(dp / dt, P)
        return FROBENIUS_WEIGHTS * grad

    start = 0.5 * eta
    res = minimize(
        energy,
        start,
        jac=jac,
        method='BFGS',
        options=dict(gtol=gtol, maxiter=2000))
    dp = np.asarray(res.x, dtype=np.float64)
    p = as_sym2(p_prev) + dp
    sigma = apply_C(eta - dp, E)
    return PointwiseUpdate(p, sigma, float(res.fun), int(res.nit))
