from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from plastiplate.utils import DofOrder, InitialGuess, LinearSolver


@dataclass(frozen=True)
class SolverOptions:
    """Knobs of the Newton iteration of one incremental step.

    Tolerances are scaled: the increment test is
    ``max|ΔU| < tol_increment·(1 + max|U|)·tol_scale`` and the residual test
    ``‖R‖∞ < tol_residual·(1 + ‖F_ext‖∞ + ‖F_int‖∞)·tol_scale``.

    Args:
        tol_increment (float): Displacement increment tolerance.
        tol_residual (float): Residual tolerance on the free dofs.
        max_iter (int): Newton iteration cap.
        line_search (bool): Backtrack on the incremental energy.
        max_halvings (int): Cap on the step halvings of the line search.
        linear_solver (str): ``'direct'`` or ``'cg'``.
        initial_guess (str): ``'previous'``, ``'elastic'`` or ``'zero'``.
        dof_order (str): ``'natural'`` or ``'reversed'`` numbering of the
            free unknowns.
        return_map_tol (float): Relative tolerance of the return map.
        return_map_max_iter (int): Iteration cap of the return map.
        tol_scale (float): Common factor on the Newton tolerances.
        cg_rtol (float): Relative tolerance of the CG solve.
        cg_max_iter (int, optional): Iteration cap of the CG solve.
        log_interval (int): Log an INFO line every ``log_interval`` steps,
            0 for none.
        show_progress (bool): Show a progress bar while evolving.
    """
    tol_increment: float = 1e-10
    tol_residual: float = 1e-9
    max_iter: int = 50
    line_search: bool = True
    max_halvings: int = 20
    linear_solver: str = 'direct'
    initial_guess: str = 'previous'
    dof_order: str = 'natural'
    return_map_tol: float = 1e-12
    return_map_max_iter: int = 100
    tol_scale: float = 1.0
    cg_rtol: float = 1e-12
    cg_max_iter: Optional[int] = None
    log_interval: int = 0
    show_progress: bool = False

    def __post_init__(self):
        for name, enum in (('linear_solver', LinearSolver),
                           ('initial_guess', InitialGuess),
                           ('dof_order', DofOrder)):
            value = getattr(self, name)
            if value not in enum.values():
                raise ValueError(f'{name} must be one of {enum.values()}, '
                                 f'got {value!r}')
        for name in ('tol_increment', 'tol_residual', 'return_map_tol',
                     'tol_scale', 'cg_rtol'):
            if not getattr(self, name) > 0:
                raise ValueError(f'{name} must be positive')
        for name in ('max_iter', 'return_map_max_iter'):
            if getattr(self, name) < 1:
                raise ValueError(f'{name} must be at least 1')
        if self.max_halvings < 0 or self.log_interval < 0:
            raise ValueError('max_halvings and log_interval must be >= 0')

    @property
    def guess(self) -> InitialGuess:
        return InitialGuess.get(self.initial_guess)

    @property
    def order(self) -> DofOrder:
        return DofOrder.get(self.dof_order)

    @property
    def linear(self) -> LinearSolver:
        return LinearSolver.get(self.linear_solver)

    def replace(self, **kwargs) -> 'SolverOptions':
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))
