from typing import Optional, Tuple

import numpy as np

from .base_data_element import BaseDataElement


class LayeredField(BaseDataElement):
    """Sym2 values per (node, layer) of a :class:`PlateGrid`.

    Every data field is a finite float array of shape (ny, nx, layers, 3)
    and all fields of one element share that shape. Stress, elastic and
    plastic strain and the safe-load field are stored this way.

    Examples:
        >>> f = LayeredField(values=np.zeros((5, 5, 2, 3)))
        >>> f.shape
        (5, 5, 2, 3)
    """

    def __setattr__(self, name: str, value):
        value = np.asarray(value, dtype=np.float64)
        assert value.ndim == 4 and value.shape[-1] == 3, \
            f'layered fields have shape (ny, nx, layers, 3), got {value.shape}'
        if self.shape is not None and name not in self._data_fields:
            assert value.shape == self.shape, (
                f'shape {value.shape} of {name} is not consistent with '
                f'{self.shape}')
        assert np.all(np.isfinite(value)), f'{name} has non-finite entries'
        super().__setattr__(name, value)

    @property
    def shape(self) -> Optional[Tuple[int, ...]]:
        if len(self._data_fields) > 0:
            return getattr(self, self.keys()[0]).shape
        return None

    @property
    def num_layers(self) -> int:
        return self.shape[2]

    @classmethod
    def zeros(cls, grid) -> 'LayeredField':
        return cls(values=np.zeros(grid.layered_shape))

    def layer(self, index: int) -> np.ndarray:
        """Sym2 field of one layer, shape (ny, nx, 3)."""
        return self.values[:, :, index, :]

    def to_points(self) -> np.ndarray:
        """Values as (layers, nodes, 3), nodes flattened row-major."""
        ny, nx, nl, _ = self.shape
        return np.ascontiguousarray(
            self.values.transpose(2, 0, 1, 3).reshape(nl, ny * nx, 3))

    @classmethod
    def from_points(cls, points: np.ndarray, ny: int,
                    nx: int) -> 'LayeredField':
        nl = points.shape[0]
        return cls(values=points.reshape(nl, ny, nx, 3).transpose(1, 2, 0, 3))


class KLDisplacement(BaseDataElement):
    """Kirchhoff–Love displacement (ū, u₃).

    ``ubar`` has shape (ny, nx, 2) and ``u3`` shape (ny, nx). The 3D field
    is u_α = ū_α − x₃ ∂_α u₃, u₃ independent of x₃.
    """

    def __init__(self, ubar=None, u3=None, **kwargs):
        super().__init__(**kwargs)
        if ubar is not None:
            self.ubar = np.asarray(ubar, dtype=np.float64)
        if u3 is not None:
            self.u3 = np.asarray(u3, dtype=np.float64)
        if ubar is not None and u3 is not None:
            assert self.ubar.shape == self.u3.shape + (2, ), \
                f'ubar {self.ubar.shape} does not match u3 {self.u3.shape}'

    @classmethod
    def zeros(cls, grid) -> 'KLDisplacement':
        return cls(ubar=np.zeros(grid.shape + (2, )), u3=np.zeros(grid.shape))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.u3.shape

    def to_vector(self) -> np.ndarray:
        """Flat (u1, u2, u3) vector, component-major."""
        return np.concatenate(
            [self.ubar[..., 0].ravel(), self.ubar[..., 1].ravel(),
             self.u3.ravel()])

    @classmethod
    def from_vector(cls, vec: np.ndarray, shape: Tuple[int,
                                                       int]) -> 'KLDisplacement':
        n = shape[0] * shape[1]
        assert vec.shape == (3 * n, ), \
            f'expected a vector of length {3 * n}, got {vec.shape}'
        ubar = np.stack([vec[:n], vec[n:2 * n]], axis=-1).reshape(shape + (2, ))
        return cls(ubar=ubar, u3=vec[2 * n:].reshape(shape).copy())

    def __add__(self, other: 'KLDisplacement') -> 'KLDisplacement':
        return KLDisplacement(self.ubar + other.ubar, self.u3 + other.u3)

    def __sub__(self, other: 'KLDisplacement') -> 'KLDisplacement':
        return KLDisplacement(self.ubar - other.ubar, self.u3 - other.u3)

    def __mul__(self, scalar: float) -> 'KLDisplacement':
        return KLDisplacement(scalar * self.ubar, scalar * self.u3)

    __rmul__ = __mul__

    def displacement_3d(self, grid) -> np.ndarray:
        """Dense reconstruction at the layers, shape (ny, nx, layers, 3).

        In-plane components use the same first-derivative stencils as the
        strain operator.
        """
        diff = grid.differences
        du3 = np.stack(
            [diff.apply(diff.Dx, self.u3), diff.apply(diff.Dy, self.u3)],
            axis=-1)
        x3 = grid.x3[None, None, :, None]
        inplane = self.ubar[:, :, None, :] - x3 * du3[:, :, None, :]
        vertical = np.broadcast_to(self.u3[:, :, None, None],
                                   inplane.shape[:3] + (1, ))
        return np.concatenate([inplane, vertical], axis=-1)
