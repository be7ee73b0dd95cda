from .constants import (SYM2_COMPONENTS, AdvancedEnum, BuiltinScenario,
                        DofOrder, Edge, ExitCode, InitialGuess, LinearSolver)
from .env import collect_env, get_library_version
from .errors import (AcceptanceError, ConfigError, NewtonError, OracleError,
                     PlastiplateError, ProbeError, ReturnMapError,
                     ScenarioError, SnapshotError)
from .logging import detach_file_handlers, get_logger
from .path import check_file_exist, mkdir_or_exist, output_root, run_dir
from .timer import TimeCounter
from .utils import WarnOnlyOnce, get_root_logger

__all__ = [
    'SYM2_COMPONENTS', 'AdvancedEnum', 'BuiltinScenario', 'DofOrder', 'Edge',
    'ExitCode', 'InitialGuess', 'LinearSolver', 'collect_env',
    'get_library_version', 'AcceptanceError', 'ConfigError', 'NewtonError',
    'OracleError', 'PlastiplateError', 'ProbeError', 'ReturnMapError',
    'ScenarioError', 'SnapshotError', 'detach_file_handlers', 'get_logger',
    'check_file_exist', 'mkdir_or_exist', 'output_root', 'run_dir',
    'TimeCounter', 'WarnOnlyOnce', 'get_root_logger'
]
