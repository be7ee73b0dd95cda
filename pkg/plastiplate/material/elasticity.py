from dataclasses import dataclass
from typing import Tuple

import numpy as np

from plastiplate.ops.sym2 import IDENTITY, ArrayLike, as_sym2, trace


@dataclass(frozen=True)
class Elasticity:
    """Isotropic reduced elasticity C_r ξ = 2μ ξ + ℓ (tr ξ) I.

    Args:
        mu (float): Shear-like modulus, positive.
        ell (float): Trace coupling, with μ + ℓ > 0.
    """
    mu: float
    ell: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f'mu must be positive, got {self.mu}')
        if not self.mu + self.ell > 0:
            raise ValueError(
                f'2mu + 2ell must be positive, got mu={self.mu}, '
                f'ell={self.ell}')

    @property
    def deviatoric_compliance(self) -> float:
        """a = 1/(2μ), the compliance on trace-free matrices."""
        return 1.0 / (2.0 * self.mu)

    @property
    def trace_compliance(self) -> float:
        """b = 1/(2μ + 2ℓ), so that tr(A_r σ) = b tr σ."""
        return 1.0 / (2.0 * self.mu + 2.0 * self.ell)

    @property
    def coupling(self) -> float:
        """k in A_r σ = σ/(2μ) − k (tr σ) I."""
        return self.ell / (2.0 * self.mu * (2.0 * self.mu + 2.0 * self.ell))

    def mandel_stiffness(self) -> np.ndarray:
        e = IDENTITY
        return 2.0 * self.mu * np.eye(3) + self.ell * np.outer(e, e)

    def mandel_compliance(self) -> np.ndarray:
        e = IDENTITY
        return self.deviatoric_compliance * np.eye(3) - self.coupling * \
            np.outer(e, e)


def apply_C(xi: ArrayLike, E: Elasticity) -> np.ndarray:
    xi = as_sym2(xi)
    return 2.0 * E.mu * xi + E.ell * trace(xi)[..., None] * IDENTITY


def apply_A(sigma: ArrayLike, E: Elasticity) -> np.ndarray:
    sigma = as_sym2(sigma)
    return sigma * E.deviatoric_compliance - \
        E.coupling * trace(sigma)[..., None] * IDENTITY


def elastic_energy_density(sigma: ArrayLike, E: Elasticity) -> np.ndarray:
    """½ A_r σ:σ."""
    from plastiplate.ops.sym2 import frobenius_inner
    return 0.5 * frobenius_inner(apply_A(sigma, E), sigma)


def coercivity_constants(E: Elasticity) -> Tuple[float, float]:
    """Tight (α_A, β_A) with α_A|ξ|_r² ≤ ½ A_r ξ:ξ ≤ β_A|ξ|_r².

    Writing ξ = D + (t/2) I with D trace-free, ½ A_r ξ:ξ = ½ a|D|² + ¼ b t²
    while |ξ|_r² = |D|² + t²/6, so the Rayleigh quotient ranges between a/2
    (trace-free directions) and 3b/2 (multiples of I).
    """
    dev = 0.5 * E.deviatoric_compliance
    iso = 1.5 * E.trace_compliance
    return min(dev, iso), max(dev, iso)
