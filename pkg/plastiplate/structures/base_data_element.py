import copy
from typing import Any, Iterator, List, Optional, Tuple

import numpy as np


class BaseDataElement:
    """Named numerical fields plus scalar bookkeeping.

    Two kinds of attributes are tracked separately:

        - ``metainfo``: scalars such as ``step`` and ``time``, given to the
          constructor and fixed afterwards.
        - data: arrays or nested elements, set by plain attribute
          assignment. Subclasses check them in ``__setattr__``.

    Examples:
        >>> elem = BaseDataElement(metainfo=dict(step=3), u3=np.zeros((5, 5)))
        >>> elem.step, elem.keys()
        (3, ['u3'])
    """

    _PRIVATE = ('_metainfo_fields', '_data_fields')

    def __init__(self, *, metainfo: Optional[dict] = None, **kwargs) -> None:
        object.__setattr__(self, '_metainfo_fields', set())
        object.__setattr__(self, '_data_fields', set())
        for name, value in (metainfo or {}).items():
            self._add(name, copy.deepcopy(value), self._metainfo_fields,
                      self._data_fields)
        for name, value in kwargs.items():
            setattr(self, name, value)

    def _add(self, name: str, value: Any, group: set, other: set) -> None:
        if name in other:
            raise AttributeError(
                f'{name} is already used as a field of another kind')
        group.add(name)
        object.__setattr__(self, name, value)

    def __setattr__(self, name: str, value: Any) -> None:
        if name in self._PRIVATE:
            raise AttributeError(f'{name} is immutable')
        if name in self._metainfo_fields:
            raise AttributeError(f'meta information {name} is read-only')
        self._add(name, value, self._data_fields, self._metainfo_fields)

    def keys(self) -> List[str]:
        return sorted(self._data_fields)

    def values(self) -> list:
        return [getattr(self, k) for k in self.keys()]

    def items(self) -> Iterator[Tuple[str, Any]]:
        for k in self.keys():
            yield k, getattr(self, k)

    @property
    def metainfo(self) -> dict:
        return {k: getattr(self, k) for k in sorted(self._metainfo_fields)}

    def __contains__(self, name: str) -> bool:
        return name in self._data_fields or name in self._metainfo_fields

    def clone(self) -> 'BaseDataElement':
        """Deep copy, arrays included."""
        return self.__class__(
            metainfo=self.metainfo,
            **{
                k: v.clone() if isinstance(v, BaseDataElement) else
                copy.deepcopy(v)
                for k, v in self.items()
            })

    def __repr__(self) -> str:

        def _describe(v) -> str:
            if isinstance(v, np.ndarray):
                if not v.size:
                    return f'array(shape={v.shape})'
                return f'array(shape={v.shape}, max|.|={np.abs(v).max():.3e})'
            if isinstance(v, BaseDataElement):
                return repr(v).replace('\n', '\n    ')
            return repr(v)

        lines = [f'<{self.__class__.__name__}(']
        lines += [f'    {k}: {_describe(v)}' for k, v in self.metainfo.items()]
        lines += [f'    {k}: {_describe(v)}' for k, v in self.items()]
        lines.append(')>')
        return '\n'.join(lines)
