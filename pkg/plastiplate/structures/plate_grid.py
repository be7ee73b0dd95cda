from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from plastiplate.utils import Edge

LayerSpec = Union[int, Sequence[Tuple[float, float]]]

MAX_GAUSS_LAYERS = 8
MOMENT_TOL = 1e-12


def gauss_layers(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre rule with ``n`` points on (−½, ½).

    Returns:
        Tuple[np.ndarray, np.ndarray]: nodes x3 and weights, Σw = 1.
    """
    assert 2 <= n <= MAX_GAUSS_LAYERS, \
        f'number of Gauss layers must lie in [2, {MAX_GAUSS_LAYERS}], got {n}'
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * nodes, 0.5 * weights


def check_layer_rule(x3: np.ndarray, weights: np.ndarray) -> None:
    """Raise ValueError unless the rule integrates 1 and x3² exactly."""
    if x3.ndim != 1 or x3.shape != weights.shape or x3.size < 2:
        raise ValueError('layers must be at least two (x3, weight) pairs')
    if np.any(np.abs(x3) >= 0.5):
        raise ValueError('layer nodes must lie in the open interval (-1/2, 1/2)')
    if np.any(weights <= 0):
        raise ValueError('layer weights must be positive')
    if abs(weights.sum() - 1.0) > MOMENT_TOL:
        raise ValueError(f'layer weights sum to {weights.sum()!r}, not 1')
    second = float(np.sum(weights * x3**2))
    if abs(second - 1.0 / 12.0) > MOMENT_TOL:
        raise ValueError(
            f'layer rule gives sum(w x3^2) = {second!r}, expected 1/12')


class PlateGrid:
    """Uniform nodal grid on ω = (0, Lx) × (0, Ly) with thickness layers.

    ``nx`` and ``ny`` count all nodes including the boundary ones. Nodal
    fields have shape (ny, nx), layered Sym2 fields (ny, nx, layers, 3).

    Args:
        Lx, Ly (float): Side lengths.
        nx, ny (int): Node counts, at least 3.
        layers (int | Sequence[Tuple[float, float]]): Number of Gauss points
            on (−½, ½) or explicit (x3, weight) pairs. Defaults to 2.
        dirichlet_edges (Iterable[str]): Edges forming γ_d.
    """

    def __init__(self,
                 Lx: float = 1.0,
                 Ly: float = 1.0,
                 nx: int = 9,
                 ny: int = 9,
                 layers: LayerSpec = 2,
                 dirichlet_edges: Iterable[str] = ('left', )):
        if not (Lx > 0 and Ly > 0):
            raise ValueError(f'side lengths must be positive, got {Lx}, {Ly}')
        if nx < 3 or ny < 3:
            raise ValueError(f'need at least 3x3 nodes, got {nx}x{ny}')
        self.Lx, self.Ly = float(Lx), float(Ly)
        self.nx, self.ny = int(nx), int(ny)

        if isinstance(layers, (int, np.integer)):
            x3, w = gauss_layers(int(layers))
        else:
            pairs = np.asarray(layers, dtype=np.float64)
            if pairs.ndim != 2 or pairs.shape[1] != 2:
                raise ValueError('explicit layers must be (x3, weight) pairs')
            x3, w = pairs[:, 0].copy(), pairs[:, 1].copy()
        check_layer_rule(x3, w)
        self.x3, self.layer_weights = x3, w

        try:
            edges = [e if isinstance(e, Edge) else Edge.get(e)
                     for e in dirichlet_edges]
        except KeyError as err:
            raise ValueError(f'unknown edge, expected one of '
                             f'{Edge.values()}') from err
        if not edges:
            raise ValueError('at least one edge must carry the Dirichlet '
                             'condition')
        self.dirichlet_edges = tuple(dict.fromkeys(edges))

    def __repr__(self) -> str:
        edges = ','.join(e.value for e in self.dirichlet_edges)
        return (f'{self.__class__.__name__}(Lx={self.Lx}, Ly={self.Ly}, '
                f'nx={self.nx}, ny={self.ny}, layers={self.num_layers}, '
                f'dirichlet=[{edges}])')

    @property
    def hx(self) -> float:
        return self.Lx / (self.nx - 1)

    @property
    def hy(self) -> float:
        return self.Ly / (self.ny - 1)

    @property
    def h(self) -> float:
        return max(self.hx, self.hy)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def num_nodes(self) -> int:
        return self.nx * self.ny

    @property
    def num_layers(self) -> int:
        return int(self.x3.size)

    @property
    def layered_shape(self) -> Tuple[int, int, int, int]:
        return (self.ny, self.nx, self.num_layers, 3)

    @property
    def dirichlet_mask(self) -> dict:
        """Per-edge flag, True on γ_d and False on γ_n."""
        return {e.value: e in self.dirichlet_edges for e in Edge}

    @cached_property
    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Nodal coordinates X, Y of shape (ny, nx)."""
        x = np.linspace(0.0, self.Lx, self.nx)
        y = np.linspace(0.0, self.Ly, self.ny)
        return np.meshgrid(x, y)

    @cached_property
    def differences(self):
        from plastiplate.ops.stencils import GridDifferences
        return GridDifferences(self.nx, self.ny, self.hx, self.hy)

    @cached_property
    def operators(self):
        from plastiplate.ops.kinematics import StrainOperator
        return StrainOperator(self)

    @property
    def node_weights(self) -> np.ndarray:
        return self.differences.weights.reshape(self.shape)

    def edge_nodes(self, edge: Edge, depth: int = 0) -> np.ndarray:
        """Boolean (ny, nx) mask of the node row ``depth`` steps inside
        ``edge``."""
        mask = np.zeros(self.shape, dtype=bool)
        if edge is Edge.LEFT:
            mask[:, depth] = True
        elif edge is Edge.RIGHT:
            mask[:, self.nx - 1 - depth] = True
        elif edge is Edge.BOTTOM:
            mask[depth, :] = True
        else:
            mask[self.ny - 1 - depth, :] = True
        return mask

    @cached_property
    def fixed_dofs(self) -> np.ndarray:
        """Boolean mask over the displacement vector (u1, u2, u3).

        ū and u₃ are prescribed on the edge rows of γ_d; u₃ is also
        prescribed on the adjacent row, which clamps its normal slope.
        """
        edge = np.zeros(self.shape, dtype=bool)
        inner = np.zeros(self.shape, dtype=bool)
        for e in self.dirichlet_edges:
            edge |= self.edge_nodes(e)
            inner |= self.edge_nodes(e, depth=1)
        return np.concatenate(
            [edge.ravel(), edge.ravel(), (edge | inner).ravel()])

    @cached_property
    def free_dofs(self) -> np.ndarray:
        return np.flatnonzero(~self.fixed_dofs)

    def interior_mask(self, margin: int) -> np.ndarray:
        """Nodes at least ``margin`` grid steps away from every edge."""
        mask = np.zeros(self.shape, dtype=bool)
        if 2 * margin < min(self.nx, self.ny):
            mask[margin:self.ny - margin, margin:self.nx - margin] = True
        return mask

    def refined(self, factor: int = 2,
                layers: Optional[LayerSpec] = None) -> 'PlateGrid':
        """Grid whose nodes contain every node of this one."""
        layer_spec = layers if layers is not None else [
            (float(a), float(b)) for a, b in zip(self.x3, self.layer_weights)
        ]
        return PlateGrid(self.Lx, self.Ly, factor * (self.nx - 1) + 1,
                         factor * (self.ny - 1) + 1, layer_spec,
                         [e.value for e in self.dirichlet_edges])
