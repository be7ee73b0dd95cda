"""Algebra of 2×2 symmetric matrices.

A matrix ξ = [[a11, a12], [a12, a22]] is stored as the last axis
``(a11, a22, a12)`` of a float array, so every function below accepts a
single matrix of shape ``(3,)`` or any stack of shape ``(..., 3)`` and
reduces over the last axis. Contractions count the off-diagonal entry twice.
"""
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

ArrayLike = Union[np.ndarray, 'Sym2', tuple, list]

# ξ:ζ = Σ FROBENIUS_WEIGHTS * ξ * ζ
FROBENIUS_WEIGHTS = np.array([1.0, 1.0, 2.0])
IDENTITY = np.array([1.0, 1.0, 0.0])
MANDEL_SCALE = np.array([1.0, 1.0, np.sqrt(2.0)])


class Sym2(NamedTuple):
    """A single 2×2 symmetric matrix."""
    a11: float
    a22: float
    a12: float

    @classmethod
    def from_matrix(cls, m) -> 'Sym2':
        m = np.asarray(m, dtype=np.float64)
        assert m.shape == (2, 2), f'expected a 2x2 matrix, got {m.shape}'
        assert abs(m[0, 1] - m[1, 0]) <= 1e-12 * (1 + abs(m).max()), \
            'matrix is not symmetric'
        return cls(float(m[0, 0]), float(m[1, 1]), float(m[0, 1]))

    @classmethod
    def diag(cls, a11: float, a22: float) -> 'Sym2':
        return cls(float(a11), float(a22), 0.0)

    @classmethod
    def identity(cls) -> 'Sym2':
        return cls(1.0, 1.0, 0.0)

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)


@dataclass(frozen=True)
class YieldSurface:
    """The reduced von Mises set K_r = {ξ : |ξ|_r ≤ alpha0}."""
    alpha0: float

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError(f'alpha0 must be positive, got {self.alpha0}')

    @property
    def default_tol(self) -> float:
        return 1e-9 * self.alpha0


def as_sym2(xi: ArrayLike) -> np.ndarray:
    arr = np.asarray(xi, dtype=np.float64)
    assert arr.shape[-1:] == (3, ), \
        f'Sym2 values need a trailing axis of length 3, got {arr.shape}'
    return arr


def trace(xi: ArrayLike) -> np.ndarray:
    xi = as_sym2(xi)
    return xi[..., 0] + xi[..., 1]


def frobenius_inner(xi: ArrayLike, zeta: ArrayLike) -> np.ndarray:
    xi, zeta = as_sym2(xi), as_sym2(zeta)
    return (xi[..., 0] * zeta[..., 0] + xi[..., 1] * zeta[..., 1] +
            2.0 * xi[..., 2] * zeta[..., 2])


def frobenius_norm(xi: ArrayLike) -> np.ndarray:
    return np.sqrt(frobenius_inner(xi, xi))


def inner_r(xi: ArrayLike, zeta: ArrayLike) -> np.ndarray:
    """(ξ, ζ)_r = ξ:ζ − ⅓ tr ξ tr ζ."""
    return frobenius_inner(xi, zeta) - trace(xi) * trace(zeta) / 3.0


def norm_r(xi: ArrayLike) -> np.ndarray:
    """|ξ|_r = √(|ξ|² − ⅓(tr ξ)²), the norm whose balls are K_r."""
    # the radicand is a sum of squares up to rounding
    return np.sqrt(np.maximum(inner_r(xi, xi), 0.0))


def norm_dual(xi: ArrayLike) -> np.ndarray:
    """|ξ|_* = √(|ξ|² + (tr ξ)²), dual to |·|_r under ξ:η."""
    tr = trace(xi)
    return np.sqrt(frobenius_inner(xi, xi) + tr * tr)


def dev_r(xi: ArrayLike) -> np.ndarray:
    """ξ − ⅓ tr ξ I."""
    xi = as_sym2(xi)
    return xi - (trace(xi) / 3.0)[..., None] * IDENTITY


def lift_dual(xi: ArrayLike) -> np.ndarray:
    """ξ + tr ξ I, the inverse of :func:`dev_r`."""
    xi = as_sym2(xi)
    return xi + trace(xi)[..., None] * IDENTITY


def in_yield_set(xi: ArrayLike, K: YieldSurface, tol=None) -> np.ndarray:
    if tol is None:
        tol = K.default_tol
    assert tol >= 0, f'tol must be non-negative, got {tol}'
    return norm_r(xi) <= K.alpha0 + tol


def support_Hr(xi: ArrayLike, K: YieldSurface) -> np.ndarray:
    """Support function of K_r, H_r(ξ) = sup_{η∈K_r} ξ:η = α₀|ξ|_*."""
    return K.alpha0 * norm_dual(xi)


def to_mandel(xi: ArrayLike) -> np.ndarray:
    """(a11, a22, √2 a12): contractions become plain dot products."""
    return as_sym2(xi) * MANDEL_SCALE


def from_mandel(xi_m: ArrayLike) -> np.ndarray:
    return as_sym2(xi_m) / MANDEL_SCALE


def to_matrix(xi: ArrayLike) -> np.ndarray:
    xi = as_sym2(xi)
    out = np.empty(xi.shape[:-1] + (2, 2))
    out[..., 0, 0] = xi[..., 0]
    out[..., 1, 1] = xi[..., 1]
    out[..., 0, 1] = out[..., 1, 0] = xi[..., 2]
    return out


def random_sym2(rng: np.random.Generator, size=(), scale: float = 1.0):
    """Standard normal entries, used by the randomized property checks."""
    shape = (size, ) if isinstance(size, int) else tuple(size)
    return scale * rng.standard_normal(shape + (3, ))
