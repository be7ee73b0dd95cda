import time
from contextlib import contextmanager
from logging import Logger
from typing import Optional

import numpy as np

from plastiplate.utils.utils import get_root_logger


class TimeCounter:
    """Named wall-clock counters for the hot kernels of a time step.

    Functions are registered once with :meth:`count_time`; timing only
    happens inside an :meth:`activate` block so that undecorated runs pay a
    single dict lookup per call.
    """
    names = dict()
    logger: Optional[Logger] = None

    @classmethod
    def count_time(cls, name: str, warmup: int = 0, log_interval: int = 0):
        """Register a function under ``name``.

        Args:
            name (str): Name of this timer.
            warmup (int): Calls ignored before recording. Defaults to 0.
            log_interval (int): Log the running mean every ``log_interval``
                recorded calls; 0 disables logging. Defaults to 0.
        """

        def _register(func):
            assert warmup >= 0
            assert name not in cls.names, \
                f'The timer name "{name}" is already registered'
            cls.names[name] = dict(
                count=0,
                execute_time=[],
                log_interval=log_interval,
                warmup=warmup,
                enable=False)

            def fun(*args, **kwargs):
                stats = cls.names[name]
                if not stats['enable']:
                    return func(*args, **kwargs)

                stats['count'] += 1
                start_time = time.perf_counter()
                result = func(*args, **kwargs)
                elapsed = time.perf_counter() - start_time

                if stats['count'] > stats['warmup']:
                    stats['execute_time'].append(elapsed)
                    recorded = len(stats['execute_time'])
                    interval = stats['log_interval']
                    if interval and recorded % interval == 0:
                        mean_ms = 1000 * float(np.mean(stats['execute_time']))
                        cls.logger.info(f'[{name}]-{stats["count"]} mean '
                                        f'{mean_ms:.2f} ms per call')
                return result

            fun.__name__ = func.__name__
            fun.__doc__ = func.__doc__
            return fun

        return _register

    @classmethod
    @contextmanager
    def activate(cls,
                 func_name: Optional[str] = None,
                 warmup: int = 0,
                 log_interval: int = 0,
                 logger: Optional[Logger] = None):
        """Enable the counters inside a ``with`` block.

        Args:
            func_name (str, optional): Only activate this timer. All
                registered timers are activated when None.
            warmup (int): Calls ignored before recording.
            log_interval (int): Interval between log lines, 0 for none.
            logger (Logger, optional): Defaults to the package logger.
        """
        cls.logger = logger or get_root_logger()
        if func_name is not None:
            assert func_name in cls.names, \
                f'{func_name} must be registered before activation'
            targets = [func_name]
        else:
            targets = list(cls.names)
        for name in targets:
            cls.names[name].update(
                warmup=warmup, log_interval=log_interval, enable=True,
                count=0, execute_time=[])
        try:
            yield
        finally:
            for name in targets:
                cls.names[name]['enable'] = False

    @classmethod
    def summary(cls, name: str) -> dict:
        """Latency statistics in milliseconds of a registered timer."""
        assert name in cls.names, f'unknown timer {name}'
        execute_time = cls.names[name]['execute_time']
        if not execute_time:
            return dict(calls=0, mean=0.0, median=0.0, min=0.0, max=0.0)
        ms = 1000 * np.asarray(execute_time)
        return dict(
            calls=len(execute_time),
            mean=float(ms.mean()),
            median=float(np.median(ms)),
            min=float(ms.min()),
            max=float(ms.max()))

    @classmethod
    def print_stats(cls, name: str):
        """Print statistics of a timer as a table.

        Args:
            name (str): The name registered with `count_time`.
        """
        from prettytable import PrettyTable

        stats = cls.summary(name)
        results = PrettyTable()
        results.title = name
        results.field_names = ['Stats', 'Latency/ms']
        results.add_rows([
            ['Calls', stats['calls']],
            ['Mean', stats['mean']],
            ['Median', stats['median']],
            ['Min', stats['min']],
            ['Max', stats['max']],
        ])
        results.float_format = '.3'
        print(results)
