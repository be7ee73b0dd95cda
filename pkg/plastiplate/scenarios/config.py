"""JSON run configuration.

A configuration file holds the sections ``geometry``, ``material``,
``yield``, ``time``, ``data``, ``solver``, ``sweep`` and ``output``; every
section and field is optional and missing values take the defaults below.
``"scenario": "<name>"`` starts from a builtin scenario and overrides it
section by section. Unknown keys are errors.
"""
import copy
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Union

from plastiplate.solver.options import SolverOptions
from plastiplate.utils import ConfigError, Edge, check_file_exist

REFINEMENTS = ('time', 'mesh')


def _section(cls, data: Any, path: str):
    """Instantiate a flat dataclass from a dict, rejecting unknown keys."""
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f'expected an object, got {type(data).__name__}',
                          path, 'type')
    names = {f.name for f in fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f'unknown key, expected one of {sorted(names)}',
                              f'{path}.{key}', 'unknown_key')
    return cls(**copy.deepcopy(data))


@dataclass
class GeometryConfig:
    Lx: float = 1.0
    Ly: float = 1.0
    nx: int = 9
    ny: int = 9
    layers: Union[int, List[List[float]]] = 2
    dirichlet_edges: List[str] = field(default_factory=lambda: ['left'])


@dataclass
class MaterialConfig:
    mu: float = 1.0
    ell: float = 0.5


@dataclass
class YieldConfig:
    alpha0: float = 1.0
    N: int = 8
    lam: float = 2.0
    gamma: float = 0.1


@dataclass
class TimeConfig:
    T: float = 1.0
    k: int = 20


@dataclass
class PresetConfig:
    """A named preset with its keyword parameters and time profile."""
    preset: str = 'zero'
    params: Dict[str, Any] = field(default_factory=dict)
    profile: Optional[Dict[str, Any]] = None


@dataclass
class DataConfig:
    rho: PresetConfig = field(default_factory=PresetConfig)
    w: PresetConfig = field(default_factory=PresetConfig)
    init: PresetConfig = field(
        default_factory=lambda: PresetConfig(preset='rest'))

    @classmethod
    def from_dict(cls, data: Any, path: str = 'data') -> 'DataConfig':
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise ConfigError('expected an object', path, 'type')
        default = cls()
        values = {}
        for key, spec in data.items():
            if key not in ('rho', 'w', 'init'):
                raise ConfigError('unknown key, expected rho, w or init',
                                  f'{path}.{key}', 'unknown_key')
            values[key] = _section(PresetConfig, spec, f'{path}.{key}')
        return cls(**{
            k: values.get(k, getattr(default, k))
            for k in ('rho', 'w', 'init')
        })


@dataclass
class SolverConfig:
    """Newton options plus the worker count of sweeps."""
    options: SolverOptions = field(default_factory=SolverOptions)
    threads: int = 1

    @classmethod
    def from_dict(cls, data: Any, path: str = 'solver') -> 'SolverConfig':
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise ConfigError('expected an object', path, 'type')
        data = dict(data)
        threads = data.pop('threads', 1)
        names = SolverOptions.field_names()
        for key in data:
            if key not in names:
                raise ConfigError(
                    f'unknown key, expected threads or one of {names}',
                    f'{path}.{key}', 'unknown_key')
        try:
            options = SolverOptions(**data)
        except (TypeError, ValueError) as err:
            raise ConfigError(str(err), path, 'solver_options') from err
        return cls(options, threads)

    def to_dict(self) -> dict:
        out = self.options.to_dict()
        out['threads'] = self.threads
        return out


@dataclass
class SweepConfig:
    """Ladder lists and refinement studies run by ``plastiplate sweep``."""
    Ns: List[int] = field(default_factory=list)
    lambdas: List[float] = field(default_factory=list)
    refinement: List[str] = field(default_factory=list)
    levels: int = 2


@dataclass
class OutputConfig:
    out_dir: Optional[str] = None
    stride: int = 1
    snapshots: bool = True
    png: bool = False


@dataclass
class Config:
    name: str = 'custom'
    scenario: Optional[str] = None
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    material: MaterialConfig = field(default_factory=MaterialConfig)
    yield_: YieldConfig = field(default_factory=YieldConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    data: DataConfig = field(default_factory=DataConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    SECTIONS = ('geometry', 'material', 'yield', 'time', 'data', 'solver',
                'sweep', 'output')

    @classmethod
    def from_dict(cls, data: dict) -> 'Config':
        """Parse a configuration mapping; a ``scenario`` key merges the
        named builtin underneath."""
        if not isinstance(data, dict):
            raise ConfigError('the configuration must be a JSON object', '',
                              'type')
        data = copy.deepcopy(data)
        base_name = data.get('scenario')
        if base_name is not None:
            from .builtin import builtin_config
            try:
                base = builtin_config(base_name)
            except KeyError as err:
                raise ConfigError(str(err), 'scenario',
                                  'unknown_scenario') from err
            data = merge_dicts(base, data)
        for key in data:
            if key not in ('name', 'scenario') + cls.SECTIONS:
                raise ConfigError('unknown section', key, 'unknown_key')
        return cls(
            name=str(data.get('name', base_name or 'custom')),
            scenario=base_name,
            geometry=_section(GeometryConfig, data.get('geometry'),
                              'geometry'),
            material=_section(MaterialConfig, data.get('material'),
                              'material'),
            yield_=_section(YieldConfig, data.get('yield'), 'yield'),
            time=_section(TimeConfig, data.get('time'), 'time'),
            data=DataConfig.from_dict(data.get('data')),
            solver=SolverConfig.from_dict(data.get('solver')),
            sweep=_section(SweepConfig, data.get('sweep'), 'sweep'),
            output=_section(OutputConfig, data.get('output'), 'output'))

    def to_dict(self) -> dict:
        """Fully expanded mapping; ``from_dict(to_dict())`` reproduces it.

        The builtin base is already merged in, so ``scenario`` is dropped.
        """
        return dict(
            name=self.name,
            geometry=asdict(self.geometry),
            material=asdict(self.material),
            time=asdict(self.time),
            data=asdict(self.data),
            solver=self.solver.to_dict(),
            sweep=asdict(self.sweep),
            output=asdict(self.output),
            **{'yield': asdict(self.yield_)})


def merge_dicts(base: dict, override: dict) -> dict:
    """Recursive merge; values of ``override`` win, nested dicts merge."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge_dicts(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _require(cond: bool, msg: str, path: str, rule: str):
    if not cond:
        raise ConfigError(msg, path, rule)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def check_config(cfg: Config) -> Config:
    """Static rules that do not need the sampled data.

    Raises:
        ConfigError: With the field path and the rule id.
    """
    from plastiplate.structures import PlateGrid
    from .presets import PRESETS

    g = cfg.geometry
    _require(g.Lx > 0 and g.Ly > 0, 'side lengths must be positive',
             'geometry.Lx', 'geometry.L>0')
    _require(_is_int(g.nx) and g.nx >= 3, f'nx must be an integer >= 3, got '
             f'{g.nx}', 'geometry.nx', 'grid.nodes>=3')
    _require(_is_int(g.ny) and g.ny >= 3, f'ny must be an integer >= 3, got '
             f'{g.ny}', 'geometry.ny', 'grid.nodes>=3')
    for edge in g.dirichlet_edges:
        _require(edge in Edge.values(), f'unknown edge {edge!r}, expected '
                 f'one of {Edge.values()}', 'geometry.dirichlet_edges',
                 'edge')
    try:
        PlateGrid(g.Lx, g.Ly, g.nx, g.ny, g.layers, g.dirichlet_edges)
    except (ValueError, AssertionError) as err:
        raise ConfigError(str(err), 'geometry.layers', 'quadrature') from err

    m = cfg.material
    _require(m.mu > 0, f'mu must be positive, got {m.mu}', 'material.mu',
             'mu>0')
    _require(m.mu + m.ell > 0, 'mu + ell must be positive', 'material.ell',
             'mu+ell>0')

    y = cfg.yield_
    _require(y.alpha0 > 0, f'alpha0 must be positive, got {y.alpha0}',
             'yield.alpha0', 'alpha0>0')
    _require(_is_int(y.N) and y.N >= 4, f'N must be an integer >= 4, got '
             f'{y.N}', 'yield.N', 'N>=4')
    _require(y.lam > 0, f'lambda must be positive, got {y.lam}', 'yield.lam',
             'lambda>0')
    _require(0 < y.gamma < 1, f'gamma must lie in (0, 1), got {y.gamma}',
             'yield.gamma', 'gamma')

    t = cfg.time
    _require(t.T > 0, f'T must be positive, got {t.T}', 'time.T', 'T>0')
    _require(_is_int(t.k) and t.k >= 2, f'k must be an integer >= 2, got '
             f'{t.k}', 'time.k', 'k>=2')

    for kind in ('rho', 'w', 'init'):
        spec = getattr(cfg.data, kind)
        path = f'data.{kind}'
        _require(
            PRESETS.find(kind, spec.preset) is not None,
            f'unknown preset {spec.preset!r}, expected one of '
            f'{PRESETS.names(kind)}', f'{path}.preset', 'preset')
        accepted = PRESETS.parameters(kind, spec.preset)
        for key in spec.params:
            _require(key in accepted, f'unknown parameter, expected one of '
                     f'{sorted(accepted)}', f'{path}.params.{key}', 'preset')
        if spec.profile is not None:
            _require(kind != 'init', 'initial data take no profile',
                     f'{path}.profile', 'preset')
            name = spec.profile.get('name')
            _require(
                PRESETS.find('profile', name) is not None,
                f'unknown profile {name!r}, expected one of '
                f'{PRESETS.names("profile")}', f'{path}.profile.name',
                'preset')
            accepted = PRESETS.parameters('profile', name)
            for key in spec.profile:
                _require(key == 'name' or key in accepted,
                         f'unknown parameter, expected one of '
                         f'{sorted(accepted)}', f'{path}.profile.{key}',
                         'preset')

    _require(_is_int(cfg.solver.threads) and cfg.solver.threads >= 1,
             'threads must be a positive integer', 'solver.threads',
             'threads>=1')

    s = cfg.sweep
    for N in s.Ns:
        _require(_is_int(N) and N >= 4, f'ladder N must be >= 4, got {N}',
                 'sweep.Ns', 'N>=4')
    for lam in s.lambdas:
        _require(lam > 0, f'ladder lambda must be positive, got {lam}',
                 'sweep.lambdas', 'lambda>0')
    _require(s.Ns == sorted(s.Ns) and s.lambdas == sorted(s.lambdas),
             'ladder lists must be ascending', 'sweep', 'ascending')
    for kind in s.refinement:
        _require(kind in REFINEMENTS, f'unknown refinement {kind!r}, '
                 f'expected one of {REFINEMENTS}', 'sweep.refinement',
                 'refinement')
    _require(_is_int(s.levels) and s.levels >= 1, 'levels must be >= 1',
             'sweep.levels', 'levels>=1')

    _require(_is_int(cfg.output.stride) and cfg.output.stride >= 1,
             'stride must be a positive integer', 'output.stride',
             'stride>=1')
    return cfg


# where each scenario rule is reported in the configuration
SCENARIO_RULE_PATHS = dict(
    finite='data',
    safe_load='data.rho',
    rho_equilibrium='data.rho',
    shape='data.init',
    initial_yield='data.init',
    initial_equilibrium='data.init',
    initial_boundary='data.init')


def load_config(path: str, validate: bool = True) -> Config:
    """Parse, check and (by default) validate the scenario of a JSON file.

    Raises:
        ConfigError: On a JSON syntax error (with line and column) or on any
            violated rule.
    """
    check_file_exist(path)
    with open(path) as f:
        text = f.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f'invalid JSON: {err.msg} at line {err.lineno}, column '
            f'{err.colno}', path, 'json') from err
    try:
        cfg = check_config(Config.from_dict(data))
    except TypeError as err:
        raise ConfigError(str(err), path, 'type') from err
    if validate:
        validate_config(cfg)
    return cfg


def validate_config(cfg: Config):
    """Build the scenario of ``cfg`` and check its sampled data."""
    from plastiplate.utils import ScenarioError
    from .builtin import build_scenario
    try:
        return build_scenario(cfg).validate()
    except ScenarioError as err:
        raise ConfigError(
            str(err), SCENARIO_RULE_PATHS.get(err.rule, 'data'),
            err.rule) from err
    except ConfigError:
        raise
    except (OSError, ValueError) as err:
        raise ConfigError(str(err), 'data', 'data') from err


def dump_config(cfg: Config, path: str) -> None:
    with open(path, 'w') as f:
        json.dump(cfg.to_dict(), f, indent=2)
