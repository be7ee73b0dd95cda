"""Norton–Hoff potential φ_N, its truncation ψ_λ and the conjugate F_λ.

With s = |ξ|_r,

    φ_N(ξ) = s^N / (N α₀^{N−1})
    ψ_λ(ξ) = (s^N ∧ λ^N) / (N α₀^{N−1})
             + λ^{N−2} (s² − λ²)⁺ / (2 α₀^{N−1})

and both differentials are c(s)·dev_r ξ with the flow factor
c(s) = (s ∧ λ)^{N−2} / α₀^{N−1} (no cap for φ_N). All functions are
vectorized over a trailing Sym2 axis.
"""
from dataclasses import dataclass

import numpy as np

from .sym2 import ArrayLike, dev_r, lift_dual, norm_dual, norm_r


@dataclass(frozen=True)
class NortonHoffParams:
    N: int
    alpha0: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4:
            raise ValueError(f'N must be an integer >= 4, got {self.N}')
        if not self.alpha0 > 0:
            raise ValueError(f'alpha0 must be positive, got {self.alpha0}')


@dataclass(frozen=True)
class TruncationParams:
    base: NortonHoffParams
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f'lambda must be positive, got {self.lam}')

    @classmethod
    def create(cls, N: int, alpha0: float, lam: float) -> 'TruncationParams':
        return cls(NortonHoffParams(N, alpha0), lam)

    @property
    def N(self) -> int:
        return int(self.base.N)

    @property
    def alpha0(self) -> float:
        return float(self.base.alpha0)

    @property
    def cap_factor(self) -> float:
        """Largest flow factor λ^{N−2}/α₀^{N−1}, reached for s ≥ λ."""
        return self.lam**(self.N - 2) / self.alpha0**(self.N - 1)

    @property
    def dual_threshold(self) -> float:
        """|y|_* at which F_λ switches to its quadratic branch."""
        return (self.lam / self.alpha0)**(self.N - 1)


def flow_factor(s, P: TruncationParams) -> np.ndarray:
    """c(s) = (s ∧ λ)^{N−2} / α₀^{N−1}."""
    s = np.asarray(s, dtype=np.float64)
    return np.minimum(s, P.lam)**(P.N - 2) / P.alpha0**(P.N - 1)


def flow_factor_slope(s, P: TruncationParams) -> np.ndarray:
    """c'(s)/s, using the right derivative 0 at the cap s = λ."""
    s = np.asarray(s, dtype=np.float64)
    N = P.N
    below = (N - 2) * np.minimum(s, P.lam)**(N - 4) / P.alpha0**(N - 1)
    return np.where(s < P.lam, below, 0.0)


def phi_N(xi: ArrayLike, P: NortonHoffParams) -> np.ndarray:
    s = norm_r(xi)
    return s**P.N / (P.N * P.alpha0**(P.N - 1))


def dphi_N(xi: ArrayLike, P: NortonHoffParams) -> np.ndarray:
    s = norm_r(xi)
    c = s**(P.N - 2) / P.alpha0**(P.N - 1)
    return c[..., None] * dev_r(xi)


def psi_lambda(xi: ArrayLike, P: TruncationParams) -> np.ndarray:
    N, alpha0, lam = P.N, P.alpha0, P.lam
    s = norm_r(xi)
    head = np.minimum(s, lam)**N / (N * alpha0**(N - 1))
    tail = lam**(N - 2) * np.maximum(s * s - lam * lam, 0.0) / (
        2.0 * alpha0**(N - 1))
    return head + tail


def dpsi_lambda(xi: ArrayLike, P: TruncationParams) -> np.ndarray:
    c = flow_factor(norm_r(xi), P)
    return c[..., None] * dev_r(xi)


def F_lambda(y: ArrayLike, P: TruncationParams) -> np.ndarray:
    """Closed form of the conjugate ψ_λ*.

    With t = |y|_* and t_λ = (λ/α₀)^{N−1}::

        F_λ(y) = α₀ (N−1)/N · (t^{N/(N−1)} ∧ (λ/α₀)^N)
                 + α₀^{N−1} / (2 λ^{N−2}) · (t² − t_λ²)⁺
    """
    N, alpha0, lam = P.N, P.alpha0, P.lam
    t = norm_dual(y)
    head = alpha0 * (N - 1) / N * np.minimum(
        t**(N / (N - 1)), (lam / alpha0)**N)
    tail = alpha0**(N - 1) / (2.0 * lam**(N - 2)) * np.maximum(
        t * t - P.dual_threshold**2, 0.0)
    return head + tail


def dF_lambda(y: ArrayLike, P: TruncationParams) -> np.ndarray:
    """Gradient of F_λ, the inverse map of :func:`dpsi_lambda`.

    DF_λ(y) = lift_dual(y) / c, where c is the flow factor of the preimage:
    α₀·(t^{(2−N)/(N−1)} ∨ (λ/α₀)^{2−N}) with t = |y|_*. DF_λ(0) = 0.
    """
    N, alpha0, lam = P.N, P.alpha0, P.lam
    t = norm_dual(y)
    positive = t > 0
    safe_t = np.where(positive, t, 1.0)
    inv_c = alpha0 * np.maximum(safe_t**((2.0 - N) / (N - 1)),
                                (lam / alpha0)**(2 - N))
    inv_c = np.where(positive, inv_c, 0.0)
    return inv_c[..., None] * lift_dual(y)


def conjugate_numeric(y: ArrayLike, P: TruncationParams, R=None,
                      n: int = 21) -> float:
    """Brute-force sup_ξ {y:ξ − ψ_λ(ξ)}.

    Test oracle for :func:`F_lambda`; the search itself lives in
    :func:`plastiplate.oracle.conjugate_sup`.
    """
    from plastiplate.oracle.conjugate import conjugate_sup
    return conjugate_sup(y, P, R=R, n=n)
