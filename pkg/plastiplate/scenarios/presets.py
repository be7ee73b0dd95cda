"""Named closed-form data: time profiles, safe-load stresses ϱ, boundary
data w and initial data.

Every preset is a factory registered under a (kind, name) pair. Factories
receive the grid and the preset parameters as keywords; ``profile``
factories return a scalar function of time, ``rho`` and ``w`` factories
return samplers t ↦ field, and ``init`` factories return
:class:`InitialData`.
"""
import inspect
from typing import Callable, Dict, Optional

import numpy as np

from plastiplate.ops.sym2 import norm_r
from plastiplate.solver.scenario import InitialData
from plastiplate.structures import KLDisplacement, PlateGrid

KINDS = ('profile', 'rho', 'w', 'init')


class PresetRegistry:
    """Registry of data presets."""

    def __init__(self):
        self._module_dict: Dict[str, Dict[str, Callable]] = {
            kind: {}
            for kind in KINDS
        }

    def register(self, kind: str, name: Optional[str] = None):
        """Register a preset factory.

        Args:
            kind (str): One of ``KINDS``.
            name (str, optional): Preset name. Defaults to the function name.
        """
        from plastiplate.utils import get_root_logger
        logger = get_root_logger()
        assert kind in KINDS, f'kind must be one of {KINDS}, got {kind}'

        def wrap_factory(func):
            key = name if name is not None else func.__name__
            if key in self._module_dict[kind]:
                logger.info(f'{kind} preset `{key}` has been re-registered.')
            self._module_dict[kind][key] = func
            return func

        return wrap_factory

    def names(self, kind: str):
        return sorted(self._module_dict[kind])

    def find(self, kind: str, name: str) -> Optional[Callable]:
        return self._module_dict[kind].get(name, None)

    def parameters(self, kind: str, name: str):
        """Keyword parameters accepted by a preset, with their defaults."""
        func = self._module_dict[kind][name]
        return {
            k: p.default
            for k, p in inspect.signature(func).parameters.items()
            if p.kind is p.KEYWORD_ONLY
        }

    def build(self, kind: str, name: str, *args, **params):
        func = self.find(kind, name)
        if func is None:
            raise KeyError(f'unknown {kind} preset `{name}`, expected one of '
                           f'{self.names(kind)}')
        accepted = self.parameters(kind, name)
        unknown = sorted(set(params) - set(accepted))
        if unknown:
            raise TypeError(f'{kind} preset `{name}` got unknown parameters '
                            f'{unknown}, accepts {sorted(accepted)}')
        return func(*args, **params)


PRESETS = PresetRegistry()


def bump(grid: PlateGrid, power: int = 2) -> np.ndarray:
    """(sin(πx/Lx) sin(πy/Ly))^power, in [0, 1] and flat on ∂ω."""
    X, Y = grid.coordinates
    return (np.sin(np.pi * X / grid.Lx) * np.sin(np.pi * Y / grid.Ly))**power


def _unit_direction(direction) -> np.ndarray:
    d = np.asarray(direction, dtype=np.float64)
    assert d.shape == (3, ), f'direction must be a Sym2, got {d.shape}'
    size = float(norm_r(d))
    assert size > 0, 'direction must have a nonzero deviatoric size'
    return d / size


# ----------------------------------------------------------------------
# time profiles
# ----------------------------------------------------------------------
@PRESETS.register('profile')
def constant(*, value: float = 1.0):
    return lambda t: value


@PRESETS.register('profile')
def ramp(*, duration: float = 1.0, height: float = 1.0):
    """Linear rise from 0 to ``height`` over ``duration``, then flat."""
    return lambda t: height * min(t / duration, 1.0)


@PRESETS.register('profile')
def linear(*, slope: float = 1.0, offset: float = 0.0):
    return lambda t: offset + slope * t


@PRESETS.register('profile')
def pulse(*, start: float = 0.0, width: float = 0.1, height: float = 1.0):
    """sin² window of ``width`` starting at ``start``, zero elsewhere."""

    def f(t):
        s = (t - start) / width
        return height * np.sin(np.pi * s)**2 if 0.0 <= s <= 1.0 else 0.0

    return f


def _profile(spec) -> Callable[[float], float]:
    if spec is None:
        return PRESETS.build('profile', 'constant')
    spec = dict(spec)
    name = spec.pop('name')
    return PRESETS.build('profile', name, **spec)


# ----------------------------------------------------------------------
# safe-load stresses
# ----------------------------------------------------------------------
@PRESETS.register('rho', 'zero')
def zero_stress(grid: PlateGrid, profile=None):
    field = np.zeros(grid.layered_shape)
    return lambda t: field


@PRESETS.register('rho')
def bending_bump(grid: PlateGrid,
                 profile=None,
                 *,
                 amplitude: float = 0.5,
                 direction=(1.0, -1.0, 0.0)):
    """ϱ = amplitude · 2x₃ · bump · d with |d|_r = 1, a pure bending
    stress with |ϱ|_r ≤ amplitude."""
    prof = _profile(profile)
    d = _unit_direction(direction)
    shape = bump(grid)[:, :, None, None] * (2.0 * grid.x3)[None, None, :,
                                                           None] * d
    return lambda t: amplitude * prof(t) * shape


@PRESETS.register('rho')
def membrane_bump(grid: PlateGrid,
                  profile=None,
                  *,
                  amplitude: float = 0.5,
                  direction=(1.0, -1.0, 0.0)):
    """ϱ = amplitude · bump · d, constant through the thickness."""
    prof = _profile(profile)
    d = _unit_direction(direction)
    shape = np.broadcast_to(
        bump(grid)[:, :, None, None] * d, grid.layered_shape).copy()
    return lambda t: amplitude * prof(t) * shape


@PRESETS.register('rho')
def table(grid: PlateGrid, profile=None, *, path: str = ''):
    """Tabulated samples, linearly interpolated in time and held constant
    outside the tabulated range."""
    from plastiplate.io import read_stress_table
    times, samples = read_stress_table(path)
    if samples.shape[1:] != grid.layered_shape:
        raise ValueError(f'table samples have shape {samples.shape[1:]}, '
                         f'the grid needs {grid.layered_shape}')
    prof = _profile(profile)

    def sample(t):
        j = int(np.searchsorted(times, t, side='right'))
        if j == 0:
            value = samples[0]
        elif j == len(times):
            value = samples[-1]
        else:
            a = (t - times[j - 1]) / (times[j] - times[j - 1])
            value = (1.0 - a) * samples[j - 1] + a * samples[j]
        return prof(t) * value

    return sample


# ----------------------------------------------------------------------
# boundary data
# ----------------------------------------------------------------------
@PRESETS.register('w', 'zero')
def zero_displacement(grid: PlateGrid, profile=None):
    field = KLDisplacement.zeros(grid)
    return lambda t: field


@PRESETS.register('w')
def clamped_bend(grid: PlateGrid, profile=None, *, slope: float = 0.01):
    """w₃ = slope · x (1 − x/Lx): level on the left and right edges, which
    it turns by ±``slope``."""
    prof = _profile(profile)
    X, _ = grid.coordinates
    shape = X * (1.0 - X / grid.Lx)
    ubar = np.zeros(grid.shape + (2, ))
    return lambda t: KLDisplacement(ubar=ubar, u3=slope * prof(t) * shape)


@PRESETS.register('w')
def stretch(grid: PlateGrid, profile=None, *, strain: float = 0.01):
    """w̄₁ = strain · x, w₃ = 0: uniaxial stretch."""
    prof = _profile(profile)
    X, _ = grid.coordinates
    u3 = np.zeros(grid.shape)

    def sample(t):
        ubar = np.zeros(grid.shape + (2, ))
        ubar[..., 0] = strain * prof(t) * X
        return KLDisplacement(ubar=ubar, u3=u3)

    return sample


# ----------------------------------------------------------------------
# initial data; u₀ = w(0) so the boundary condition holds at the seed
# ----------------------------------------------------------------------
@PRESETS.register('init')
def rest(grid: PlateGrid, w0: KLDisplacement, rho0: np.ndarray):
    return InitialData(
        u0=w0.clone(),
        sigma0=np.zeros(grid.layered_shape),
        v0=KLDisplacement.zeros(grid))


@PRESETS.register('init')
def prestressed(grid: PlateGrid, w0: KLDisplacement, rho0: np.ndarray):
    """σ₀ = ϱ(0), which balances the loads at t = 0."""
    return InitialData(
        u0=w0.clone(),
        sigma0=np.array(rho0, dtype=np.float64),
        v0=KLDisplacement.zeros(grid))


@PRESETS.register('init')
def velocity(grid: PlateGrid,
             w0: KLDisplacement,
             rho0: np.ndarray,
             *,
             amplitude: float = 0.1):
    """Transverse velocity v₀₃ = amplitude · bump on the free u₃ nodes, at
    rest otherwise."""
    n = grid.num_nodes
    free_u3 = ~grid.fixed_dofs[2 * n:].reshape(grid.shape)
    v0 = KLDisplacement.zeros(grid)
    v0.u3 = amplitude * bump(grid) * free_u3
    return InitialData(
        u0=w0.clone(), sigma0=np.zeros(grid.layered_shape), v0=v0)
