from .builtin import (build_scenario, builtin_config, builtin_scenarios,
                      load_scenario, register_scenario)
from .config import (Config, DataConfig, GeometryConfig, MaterialConfig,
                     OutputConfig, PresetConfig, SolverConfig, SweepConfig,
                     TimeConfig, YieldConfig, check_config, dump_config,
                     load_config, merge_dicts, validate_config)
from .presets import PRESETS, PresetRegistry, bump

__all__ = [
    'build_scenario', 'builtin_config', 'builtin_scenarios', 'load_scenario',
    'register_scenario', 'Config', 'DataConfig', 'GeometryConfig',
    'MaterialConfig', 'OutputConfig', 'PresetConfig', 'SolverConfig',
    'SweepConfig', 'TimeConfig', 'YieldConfig', 'check_config', 'dump_config',
    'load_config', 'merge_dicts', 'validate_config', 'PRESETS',
    'PresetRegistry', 'bump'
]
