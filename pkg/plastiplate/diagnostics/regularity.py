"""Interior difference-quotient monitors.

For an offset of m grid steps, D_α^h F(x) = (F(x + m h_α e_α) − F(x)) /
(m h_α) is evaluated on the nodes of an interior rectangle ω′ that keeps
every shifted node inside the grid. Reported norms are the sup over the
retained states of

    ‖D_α^h σ‖_{L²(ω′×(−½,½))},   ‖D₃ σ‖_{L²(ω′×I′)},   ‖D_α^h v₃‖_{L²(ω′)}

where the thickness quotient uses neighbouring layers away from the two
outermost ones, which needs at least 4 layers.
"""
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

import numpy as np

from plastiplate.ops.sym2 import frobenius_inner
from plastiplate.structures import PlateGrid, Trajectory
from plastiplate.utils import ProbeError, WarnOnlyOnce, get_root_logger

if TYPE_CHECKING:
    from plastiplate.solver.scenario import Scenario

MIN_LAYERS_D3 = 4
QUANTITIES = ('d1_sigma', 'd2_sigma', 'd3_sigma', 'd1_v3', 'd2_v3')


@dataclass(frozen=True)
class RegularityProbe:
    """Interior subdomain ω′ = nodes at least ``margin`` steps from ∂ω and
    the quotient offsets in grid steps."""
    margin: int
    offsets: Tuple[int, ...] = (4, 2, 1)

    def __post_init__(self):
        if not self.offsets or min(self.offsets) < 1:
            raise ProbeError('offsets must be positive grid multiples')

    def check(self, grid: PlateGrid):
        if self.margin < max(self.offsets):
            raise ProbeError(
                f'probe margin {self.margin} is smaller than the largest '
                f'offset {max(self.offsets)}')
        if not grid.interior_mask(self.margin).any():
            raise ProbeError(
                f'no node is {self.margin} steps inside a '
                f'{grid.nx}x{grid.ny} grid')

    def mask(self, grid: PlateGrid) -> np.ndarray:
        self.check(grid)
        return grid.interior_mask(self.margin)


@dataclass
class RegularityReport:
    offsets: Tuple[int, ...]
    sup: Dict[str, Dict[int, float]] = field(default_factory=dict)
    restricted: List[str] = field(default_factory=list)

    def values(self, name: str) -> np.ndarray:
        return np.array(list(self.sup.get(name, {}).values()))

    def variation(self, name: str) -> float:
        """(max − min) / max across offsets; 0 for a vanishing quantity."""
        v = self.values(name)
        if v.size == 0 or v.max() == 0:
            return 0.0
        return float((v.max() - v.min()) / v.max())

    def unbounded(self, tol: float = 0.2) -> List[str]:
        return [n for n in self.sup if self.variation(n) > tol]

    def as_dict(self) -> dict:
        return dict(
            offsets=list(self.offsets),
            sup={k: {str(m): v
                     for m, v in d.items()}
                 for k, d in self.sup.items()},
            restricted=list(self.restricted))

    def table(self) -> str:
        from prettytable import PrettyTable
        t = PrettyTable()
        t.title = 'Difference quotients (sup over time)'
        t.field_names = ['quantity'] + [f'h={m}h0' for m in self.offsets]
        for name, by_offset in self.sup.items():
            t.add_row([name] + [
                f'{by_offset[m]:.4e}' if m in by_offset else '-'
                for m in self.offsets
            ])
        return t.get_string()


def _forward_quotient(F: np.ndarray, axis: int, m: int,
                      h: float) -> np.ndarray:
    """Quotient on the nodes that have a forward neighbour at distance m,
    zero-padded back to the shape of F."""
    out = np.zeros_like(F)
    head = [slice(None)] * F.ndim
    tail = [slice(None)] * F.ndim
    head[axis] = slice(0, F.shape[axis] - m)
    tail[axis] = slice(m, None)
    out[tuple(head)] = (F[tuple(tail)] - F[tuple(head)]) / (m * h)
    return out


def _layered_norm(Q: np.ndarray, mask: np.ndarray, grid: PlateGrid,
                  layer_weights: np.ndarray) -> float:
    dens = frobenius_inner(Q, Q)
    val = np.einsum('yxl,yx,l->', dens, grid.node_weights * mask,
                    layer_weights)
    return float(np.sqrt(max(val, 0.0)))


def _nodal_norm(Q: np.ndarray, mask: np.ndarray, grid: PlateGrid) -> float:
    return float(np.sqrt(np.sum(grid.node_weights * mask * Q**2)))


def thickness_quotients(
        sigma: np.ndarray,
        grid: PlateGrid) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Inter-layer quotients on the interior layer pairs, or None when the
    rule has fewer than four layers."""
    L = grid.num_layers
    if L < MIN_LAYERS_D3:
        return None
    pairs = range(1, L - 2)
    x3, w = grid.x3, grid.layer_weights
    Q = np.stack([(sigma[:, :, l + 1] - sigma[:, :, l]) / (x3[l + 1] - x3[l])
                  for l in pairs],
                 axis=2)
    weights = np.array([0.5 * (w[l] + w[l + 1]) for l in pairs])
    return Q, weights


def regularity_monitor(traj: Trajectory, S: 'Scenario',
                       probe: RegularityProbe) -> RegularityReport:
    """Sup over the retained states of the interior quotient norms.

    Raises:
        ProbeError: If the probe does not fit inside the grid.
    """
    grid = S.grid
    mask = probe.mask(grid)
    report = RegularityReport(tuple(probe.offsets))
    sup = {name: {} for name in QUANTITIES}
    layer_w = grid.layer_weights
    steps = dict(x=grid.hx, y=grid.hy)

    for state in traj:
        sigma, v3 = state.sigma.values, state.v3
        for m in probe.offsets:
            vals = dict(
                d1_sigma=_layered_norm(
                    _forward_quotient(sigma, 1, m, steps['x']), mask, grid,
                    layer_w),
                d2_sigma=_layered_norm(
                    _forward_quotient(sigma, 0, m, steps['y']), mask, grid,
                    layer_w),
                d1_v3=_nodal_norm(
                    _forward_quotient(v3, 1, m, steps['x']), mask, grid),
                d2_v3=_nodal_norm(
                    _forward_quotient(v3, 0, m, steps['y']), mask, grid))
            for name, v in vals.items():
                sup[name][m] = max(sup[name].get(m, 0.0), v)
        d3 = thickness_quotients(sigma, grid)
        if d3 is not None:
            Q, w = d3
            val = _layered_norm(Q, mask, grid, w)
            for m in probe.offsets:
                sup['d3_sigma'][m] = max(sup['d3_sigma'].get(m, 0.0), val)

    if grid.num_layers < MIN_LAYERS_D3:
        del sup['d3_sigma']
        report.restricted.append('d3_sigma')
        WarnOnlyOnce.warn(
            get_root_logger(),
            f'thickness quotients need at least {MIN_LAYERS_D3} layers, '
            f'got {grid.num_layers}; d3_sigma is not monitored')
    report.sup = sup
    return report
