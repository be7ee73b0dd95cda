from typing import Iterator, List, Optional

import numpy as np

from .base_data_element import BaseDataElement
from .fields import KLDisplacement, LayeredField


class PlateState(BaseDataElement):
    """One time slice of the evolution.

    Meta information:
        - step (int): time index i.
        - time (float): t = i·δ.

    Data fields:
        - u (KLDisplacement): displacement uⁱ.
        - sigma, e, p (LayeredField): stress, elastic and plastic strain.
        - u3_prev, u3_prev2 (np.ndarray): u₃^{i−1} and u₃^{i−2}, the
          history of the three-point inertial quotient.
        - v3 (np.ndarray): (u₃ⁱ − u₃^{i−1}) / δ.
        - sigma_prev, p_prev (LayeredField, optional): the synthetic slices
          σ⁻¹ and p⁻¹ stored on the seeded state only.
        - newton_iters (int): Newton iterations spent on this step.
    """

    def summary(self) -> dict:
        from plastiplate.ops.sym2 import norm_r
        return dict(
            step=self.step,
            time=self.time,
            max_u3=float(np.abs(self.u.u3).max()),
            max_sigma_r=float(norm_r(self.sigma.values).max()),
            max_p=float(np.abs(self.p.values).max()))


class Trajectory:
    """States retained by :func:`evolve`, every ``stride``-th step plus the
    last one.

    Args:
        stride (int): Retention stride. Defaults to 1.
    """

    def __init__(self, stride: int = 1):
        assert stride >= 1, f'stride must be positive, got {stride}'
        self.stride = stride
        self.states: List[PlateState] = []

    def keep(self, state: PlateState, last: bool = False) -> bool:
        if state.step % self.stride == 0 or last:
            if self.states and self.states[-1].step == state.step:
                return False
            self.states.append(state)
            return True
        return False

    @property
    def steps(self) -> List[int]:
        return [s.step for s in self.states]

    @property
    def final(self) -> PlateState:
        return self.states[-1]

    @property
    def is_dense(self) -> bool:
        """True when consecutive steps are all present."""
        steps = self.steps
        return all(b - a == 1 for a, b in zip(steps, steps[1:]))

    def at_step(self, step: int) -> Optional[PlateState]:
        for s in self.states:
            if s.step == step:
                return s
        return None

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[PlateState]:
        return iter(self.states)

    def __getitem__(self, index) -> PlateState:
        return self.states[index]


def make_state(step: int, time: float, u: KLDisplacement, sigma, e, p,
               u3_prev: np.ndarray, u3_prev2: np.ndarray, v3: np.ndarray,
               **extra) -> PlateState:
    """Assemble a :class:`PlateState` from raw arrays or fields."""

    def _layered(x):
        return x if isinstance(x, LayeredField) else LayeredField(values=x)

    state = PlateState(metainfo=dict(step=int(step), time=float(time)))
    state.u = u
    state.sigma = _layered(sigma)
    state.e = _layered(e)
    state.p = _layered(p)
    state.u3_prev = np.asarray(u3_prev, dtype=np.float64)
    state.u3_prev2 = np.asarray(u3_prev2, dtype=np.float64)
    state.v3 = np.asarray(v3, dtype=np.float64)
    for k, v in extra.items():
        if k in ('sigma_prev', 'p_prev'):
            v = _layered(v)
        setattr(state, k, v)
    return state
