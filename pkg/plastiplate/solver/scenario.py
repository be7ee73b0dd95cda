"""Time grid and problem data of an evolution."""
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from plastiplate.material import Elasticity
from plastiplate.ops.kinematics import moment_first, moment_zero
from plastiplate.ops.potentials import TruncationParams
from plastiplate.ops.sym2 import YieldSurface, norm_r
from plastiplate.structures import KLDisplacement, PlateGrid
from plastiplate.utils import ScenarioError

StressSampler = Callable[[float], np.ndarray]
DisplacementSampler = Callable[[float], KLDisplacement]
LoadSampler = Callable[[float], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of [0, T] into ``k`` steps, t_i = i·δ."""
    T: float
    k: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f'T must be positive, got {self.T}')
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f'k must be an integer >= 2, got {self.k}')

    @property
    def delta(self) -> float:
        return self.T / self.k

    def time(self, i: int) -> float:
        return i * self.delta

    def times(self) -> np.ndarray:
        return np.arange(self.k + 1) * self.delta

    def refined(self, factor: int = 2) -> 'TimeGrid':
        return TimeGrid(self.T, self.k * factor)


@dataclass
class InitialData:
    """(u₀, σ₀, v₀); σ₀ is a layered array of shape (ny, nx, layers, 3)."""
    u0: KLDisplacement
    sigma0: np.ndarray
    v0: KLDisplacement


@dataclass
class Scenario:
    """Everything an evolution needs besides the solver options.

    ``rho`` and ``w`` are samplers of the safe-load stress and of the
    Dirichlet datum on the grid. When ``loads`` is None the loads are the
    ones ϱ balances, f = −Div_h ϱ̄ and g = −(1/12) DivDiv_h ϱ̂, so the
    safe-load equilibrium holds by construction.
    """
    grid: PlateGrid
    elasticity: Elasticity
    trunc: TruncationParams
    time: TimeGrid
    rho: StressSampler
    w: DisplacementSampler
    init: InitialData
    gamma_safe: float = 0.1
    loads: Optional[LoadSampler] = None
    name: str = 'custom'
    _samples: dict = field(default_factory=dict, init=False, repr=False,
                           compare=False)

    def __post_init__(self):
        if not 0 < self.gamma_safe < 1:
            raise ValueError(
                f'gamma_safe must lie in (0, 1), got {self.gamma_safe}')
        self._samples = dict(
            rho=lru_cache(maxsize=4)(self._sample_rho),
            w=lru_cache(maxsize=4)(self._sample_w),
            loads=lru_cache(maxsize=4)(self._sample_loads))

    @property
    def yield_surface(self) -> YieldSurface:
        return YieldSurface(self.trunc.alpha0)

    @property
    def safe_limit(self) -> float:
        return self.trunc.alpha0 * (1.0 - self.gamma_safe)

    @property
    def delta(self) -> float:
        return self.time.delta

    def _sample_rho(self, i: int) -> np.ndarray:
        values = np.asarray(self.rho(self.time.time(i)), dtype=np.float64)
        assert values.shape == self.grid.layered_shape, \
            f'rho sample has shape {values.shape}, ' \
            f'expected {self.grid.layered_shape}'
        return values

    def _sample_w(self, i: int) -> KLDisplacement:
        return self.w(self.time.time(i))

    def _sample_loads(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        if self.loads is None:
            return self.grid.operators.loads_from_stress(self.rho_at(i))
        f, g = self.loads(self.time.time(i))
        return np.asarray(f, np.float64), np.asarray(g, np.float64)

    def rho_at(self, i: int) -> np.ndarray:
        return self._samples['rho'](i)

    def w_at(self, i: int) -> KLDisplacement:
        return self._samples['w'](i)

    def loads_at(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        """(f, g) at t_i with shapes (ny, nx, 2) and (ny, nx)."""
        return self._samples['loads'](i)

    def external_force(self, i: int) -> np.ndarray:
        """Weighted nodal loads (W f₁, W f₂, W g) as a flat vector."""
        f, g = self.loads_at(i)
        W = self.grid.node_weights
        return np.concatenate([(W * f[..., 0]).ravel(),
                               (W * f[..., 1]).ravel(), (W * g).ravel()])

    def with_truncation(self,
                        N: Optional[int] = None,
                        lam: Optional[float] = None) -> 'Scenario':
        trunc = TruncationParams.create(
            self.trunc.N if N is None else N, self.trunc.alpha0,
            self.trunc.lam if lam is None else lam)
        return replace(self, trunc=trunc)

    def with_time(self, k: int) -> 'Scenario':
        return replace(self, time=TimeGrid(self.time.T, k))

    def validate(self, eq_tol: float = 1e-8) -> 'Scenario':
        """Check the data hypotheses on every sample t_0, …, t_k.

        Raises:
            ScenarioError: With the rule id and the offending location.
        """
        grid, limit = self.grid, self.safe_limit
        ops = grid.operators
        for i in range(self.time.k + 1):
            rho = self.rho_at(i)
            if not np.all(np.isfinite(rho)):
                raise ScenarioError('rho has non-finite entries',
                                    rule='finite', step=i)
            excess = norm_r(rho) - limit
            if excess.max() > 1e-12 * (1.0 + limit):
                y, x, layer = np.unravel_index(np.argmax(excess),
                                               excess.shape)
                raise ScenarioError(
                    f'|rho|_r exceeds alpha0(1-gamma) = {limit:.6g} by '
                    f'{excess.max():.3e}',
                    rule='safe_load', step=i, node=(y, x), layer=int(layer))
            f, g = self.loads_at(i)
            self._check_balance(ops, rho, f, g, eq_tol, 'rho_equilibrium', i)
            w = self.w_at(i)
            if not (np.all(np.isfinite(w.ubar)) and
                    np.all(np.isfinite(w.u3))):
                raise ScenarioError('w has non-finite entries',
                                    rule='finite', step=i)

        init = self.init
        sigma0 = np.asarray(init.sigma0, dtype=np.float64)
        if sigma0.shape != grid.layered_shape:
            raise ScenarioError(f'sigma0 has shape {sigma0.shape}',
                                rule='shape')
        excess = norm_r(sigma0) - self.trunc.alpha0
        if excess.max() > self.yield_surface.default_tol:
            y, x, layer = np.unravel_index(np.argmax(excess), excess.shape)
            raise ScenarioError('sigma0 lies outside the yield set',
                                rule='initial_yield', step=0, node=(y, x),
                                layer=int(layer))
        f0, g0 = self.loads_at(0)
        self._check_balance(ops, sigma0, f0, g0, eq_tol,
                            'initial_equilibrium', 0)
        gap = np.abs(init.u0.to_vector() - self.w_at(0).to_vector())
        gap = gap[grid.fixed_dofs]
        if gap.size and gap.max() > eq_tol * (1.0 + np.abs(
                init.u0.to_vector()).max()):
            raise ScenarioError('u0 differs from w(0) on the Dirichlet edges',
                                rule='initial_boundary', step=0)
        return self

    def _check_balance(self, ops, stress, f, g, tol, rule, step):
        bar = moment_zero(stress, self.grid)
        hat = moment_first(stress, self.grid)
        free = ~self.grid.fixed_dofs
        n = self.grid.num_nodes
        membrane = (ops.weak_divergence(bar) + f).reshape(-1, 2)
        bending = (ops.weak_divdiv(hat) / 12.0 + g).ravel()
        res = np.concatenate([
            membrane[:, 0][free[:n]], membrane[:, 1][free[n:2 * n]],
            bending[free[2 * n:]]
        ])
        scale = 1.0 + max(np.abs(f).max(), np.abs(g).max())
        if res.size and np.abs(res).max() > tol * scale:
            raise ScenarioError(
                f'stress does not balance the loads, residual '
                f'{np.abs(res).max():.3e}',
                rule=rule, step=step)
