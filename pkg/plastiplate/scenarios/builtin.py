import copy
from typing import Dict, Optional

from plastiplate.material import Elasticity
from plastiplate.ops.potentials import TruncationParams
from plastiplate.solver.scenario import Scenario, TimeGrid
from plastiplate.structures import PlateGrid
from plastiplate.utils import BuiltinScenario, get_root_logger
from .config import Config
from .presets import PRESETS

_RAMP = dict(name='ramp', duration=1.0)

_BUILTIN_CONFIGS: Dict[str, dict] = {
    'quiescent':
    dict(
        geometry=dict(nx=5, ny=5, layers=2),
        time=dict(T=1.0, k=4)),
    'elastic_bend':
    dict(
        geometry=dict(nx=9, ny=9, layers=4),
        time=dict(T=1.0, k=10),
        data=dict(
            rho=dict(
                preset='bending_bump',
                params=dict(amplitude=0.2),
                profile=_RAMP))),
    'plastic_bend':
    dict(
        geometry=dict(
            nx=9, ny=5, layers=4, dirichlet_edges=['left', 'right']),
        time=dict(T=1.0, k=10),
        data=dict(
            rho=dict(
                preset='bending_bump',
                params=dict(amplitude=0.6),
                profile=_RAMP),
            w=dict(
                preset='clamped_bend',
                params=dict(slope=1.5),
                profile=_RAMP))),
    'inertial_ring':
    dict(
        geometry=dict(nx=9, ny=9, layers=2),
        time=dict(T=1.0, k=20),
        data=dict(
            rho=dict(
                preset='bending_bump',
                params=dict(amplitude=0.8),
                profile=dict(name='pulse', start=0.0, width=0.2)))),
    'static_f':
    dict(
        geometry=dict(nx=9, ny=9, layers=4),
        time=dict(T=1.0, k=10),
        data=dict(
            rho=dict(preset='membrane_bump', params=dict(amplitude=0.5)),
            init=dict(preset='prestressed'))),
}


def builtin_config(name: str) -> dict:
    """Configuration mapping of a builtin scenario."""
    if name not in _BUILTIN_CONFIGS:
        raise KeyError(f'unknown scenario `{name}`, expected one of '
                       f'{sorted(_BUILTIN_CONFIGS)}')
    out = copy.deepcopy(_BUILTIN_CONFIGS[name])
    out['name'] = name
    return out


def builtin_scenarios() -> Dict[str, Config]:
    """Every registered scenario as a parsed :class:`Config`, in
    ``BuiltinScenario`` order."""
    return {
        s.value: Config.from_dict(builtin_config(s.value))
        for s in BuiltinScenario
    }


def register_scenario(name: str,
                      config: dict,
                      enum_name: Optional[str] = None) -> None:
    """Add a named scenario.

    Args:
        name (str): Scenario name, usable as ``"scenario"`` in a config file.
        config (dict): Configuration mapping, without ``scenario``.
        enum_name (str, optional): Member name added to
            :class:`BuiltinScenario`. Defaults to ``name.upper()``.
    """
    logger = get_root_logger()
    assert 'scenario' not in config, 'a scenario cannot extend another one'
    if enum_name is None:
        enum_name = name.upper()
    if not hasattr(BuiltinScenario, enum_name):
        from aenum import extend_enum
        extend_enum(BuiltinScenario, enum_name, name)
        logger.info(f'Registry new scenario: {enum_name} = {name}.')
    if name in _BUILTIN_CONFIGS:
        logger.info(f'Scenario `{name}` has already been registered.')
    _BUILTIN_CONFIGS[name] = copy.deepcopy(config)


def build_scenario(cfg: Config) -> Scenario:
    """Sample-ready :class:`Scenario` of a checked configuration."""
    g, m, y, t = cfg.geometry, cfg.material, cfg.yield_, cfg.time
    grid = PlateGrid(g.Lx, g.Ly, g.nx, g.ny, g.layers, g.dirichlet_edges)
    data = cfg.data
    rho = PRESETS.build('rho', data.rho.preset, grid, data.rho.profile,
                        **data.rho.params)
    w = PRESETS.build('w', data.w.preset, grid, data.w.profile,
                      **data.w.params)
    init = PRESETS.build('init', data.init.preset, grid, w(0.0), rho(0.0),
                         **data.init.params)
    return Scenario(
        grid=grid,
        elasticity=Elasticity(m.mu, m.ell),
        trunc=TruncationParams.create(y.N, y.alpha0, y.lam),
        time=TimeGrid(t.T, t.k),
        rho=rho,
        w=w,
        init=init,
        gamma_safe=y.gamma,
        name=cfg.name)


def load_scenario(name_or_config) -> Scenario:
    """Validated scenario from a builtin name or a :class:`Config`."""
    cfg = name_or_config
    if isinstance(cfg, (str, BuiltinScenario)):
        name = cfg.value if isinstance(cfg, BuiltinScenario) else cfg
        cfg = Config.from_dict(builtin_config(name))
    return build_scenario(cfg).validate()
