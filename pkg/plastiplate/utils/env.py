import importlib
import platform
from typing import Dict, Optional


def get_library_version(lib: str) -> Optional[str]:
    """``__version__`` of an importable library, None when it is missing."""
    try:
        module = importlib.import_module(lib)
    except ImportError:
        return None
    return getattr(module, '__version__', None)


def collect_env() -> Dict[str, Optional[str]]:
    """Versions of the numerical stack, recorded in every run summary."""
    env = dict(python=platform.python_version())
    for lib in ('plastiplate', 'numpy', 'scipy', 'torch'):
        env[lib] = get_library_version(lib)
    return env
