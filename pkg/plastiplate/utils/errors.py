from typing import Optional, Sequence


class PlastiplateError(RuntimeError):
    """Base class of the domain failures raised by the package."""


class ConfigError(PlastiplateError, ValueError):
    """Invalid configuration.

    Args:
        msg (str): Human readable reason.
        path (str): Dotted path of the offending field, e.g.
            ``'yield.N'``, or the file name for parse errors.
        rule (str): Identifier of the violated rule, e.g. ``'N>=4'``.
    """

    def __init__(self, msg: str, path: str = '', rule: str = ''):
        self.path = path
        self.rule = rule
        prefix = f'[{rule}] ' if rule else ''
        where = f'{path}: ' if path else ''
        super().__init__(f'{prefix}{where}{msg}')


class ScenarioError(PlastiplateError):
    """A scenario invariant does not hold on the sampled data."""

    def __init__(self,
                 msg: str,
                 rule: str = '',
                 step: Optional[int] = None,
                 node: Optional[Sequence[int]] = None,
                 layer: Optional[int] = None):
        self.rule = rule
        self.step = step
        self.node = None if node is None else tuple(int(n) for n in node)
        self.layer = layer
        loc = []
        if step is not None:
            loc.append(f'step={step}')
        if self.node is not None:
            loc.append(f'node={self.node}')
        if layer is not None:
            loc.append(f'layer={layer}')
        suffix = f' ({", ".join(loc)})' if loc else ''
        super().__init__(f'{msg}{suffix}')


class ReturnMapError(PlastiplateError):

    def __init__(self, msg: str, residual: float):
        self.residual = residual
        super().__init__(f'{msg} (last residual {residual:.3e})')


class NewtonError(PlastiplateError):

    def __init__(self, msg: str, history: Sequence[float] = ()):
        self.history = list(history)
        tail = ', '.join(f'{r:.3e}' for r in self.history[-5:])
        super().__init__(f'{msg}; residual history [..., {tail}]')


class ProbeError(PlastiplateError, ValueError):
    """A regularity probe reaches outside the grid."""


class OracleError(PlastiplateError):
    """The brute-force oracle did not produce a trustworthy answer."""


class SnapshotError(PlastiplateError, ValueError):
    """Malformed snapshot file."""


class AcceptanceError(PlastiplateError, AssertionError):
    """A diagnostic or property check failed."""

    def __init__(self, msg: str, failures: Sequence[str] = ()):
        self.failures = list(failures)
        super().__init__(msg)
