import os
import os.path as osp
from pathlib import Path
from typing import Union

DEFAULT_OUT_ROOT = 'plastiplate_runs'


def check_file_exist(filename, msg_tmpl='file "{}" does not exist'):
    if not osp.isfile(filename):
        raise FileNotFoundError(msg_tmpl.format(filename))


def mkdir_or_exist(dir_name, mode=0o777):
    if dir_name == '':
        return
    dir_name = osp.expanduser(dir_name)
    os.makedirs(dir_name, mode=mode, exist_ok=True)


def output_root(override: Union[str, Path, None] = None) -> str:
    """Resolve the directory under which run directories are created.

    ``override`` (the ``--out`` flag) wins over the ``PLASTIPLATE_OUT``
    environment variable, which wins over ``./plastiplate_runs``.
    """
    if override is not None:
        return str(override)
    return os.environ.get('PLASTIPLATE_OUT', DEFAULT_OUT_ROOT)


def run_dir(name: str, root: Union[str, Path, None] = None) -> str:
    """Create and return a fresh per-run directory ``<root>/<name>[_n]``."""
    base = osp.join(output_root(root), name)
    candidate, n = base, 1
    while osp.exists(candidate):
        candidate = f'{base}_{n}'
        n += 1
    mkdir_or_exist(candidate)
    return candidate
