"""Sparse finite-difference matrices on a uniform nodal grid.

Nodal fields of shape (ny, nx) are flattened row-major, node (j, i) maps to
``j * nx + i``. One-dimensional operators are second order everywhere:
central in the interior, one-sided at the two end nodes. Two-dimensional
operators are Kronecker products of the 1D ones.
"""
import numpy as np
import scipy.sparse as sp


def first_derivative_1d(n: int, h: float) -> sp.csr_matrix:
    """d/dx on ``n`` equispaced nodes; exact on quadratics."""
    assert n >= 3, f'need at least 3 nodes per direction, got {n}'
    d = sp.lil_matrix((n, n))
    for i in range(1, n - 1):
        d[i, i - 1] = -0.5
        d[i, i + 1] = 0.5
    d[0, 0:3] = [-1.5, 2.0, -0.5]
    d[n - 1, n - 3:n] = [0.5, -2.0, 1.5]
    return (d / h).tocsr()


def second_derivative_1d(n: int, h: float) -> sp.csr_matrix:
    """d²/dx² on ``n`` equispaced nodes; exact on cubics when n ≥ 4."""
    assert n >= 3, f'need at least 3 nodes per direction, got {n}'
    d = sp.lil_matrix((n, n))
    for i in range(1, n - 1):
        d[i, i - 1:i + 2] = [1.0, -2.0, 1.0]
    if n >= 4:
        d[0, 0:4] = [2.0, -5.0, 4.0, -1.0]
        d[n - 1, n - 4:n] = [-1.0, 4.0, -5.0, 2.0]
    else:
        d[0, 0:3] = [1.0, -2.0, 1.0]
        d[n - 1, 0:3] = [1.0, -2.0, 1.0]
    return (d / (h * h)).tocsr()


def trapezoid_weights_1d(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


class GridDifferences:
    """The 2D difference operators of an (ny, nx) nodal grid.

    Attributes:
        Dx, Dy (csr_matrix): first derivatives.
        Dxx, Dyy, Dxy (csr_matrix): second derivatives, ``Dxy = Dx @ Dy``.
        weights (np.ndarray): trapezoid quadrature weight per node, flat.
    """

    def __init__(self, nx: int, ny: int, hx: float, hy: float):
        self.nx, self.ny = nx, ny
        ix, iy = sp.identity(nx, format='csr'), sp.identity(ny, format='csr')
        d1x, d1y = first_derivative_1d(nx, hx), first_derivative_1d(ny, hy)
        d2x, d2y = second_derivative_1d(nx, hx), second_derivative_1d(ny, hy)
        self.Dx = sp.kron(iy, d1x, format='csr')
        self.Dy = sp.kron(d1y, ix, format='csr')
        self.Dxx = sp.kron(iy, d2x, format='csr')
        self.Dyy = sp.kron(d2y, ix, format='csr')
        self.Dxy = sp.kron(d1y, d1x, format='csr')
        self.weights = np.outer(
            trapezoid_weights_1d(ny, hy), trapezoid_weights_1d(nx, hx)).ravel()

    @property
    def num_nodes(self) -> int:
        return self.nx * self.ny

    def apply(self, op: sp.csr_matrix, field: np.ndarray) -> np.ndarray:
        """Apply a flat operator to an (ny, nx) field."""
        return (op @ field.reshape(-1)).reshape(self.ny, self.nx)
