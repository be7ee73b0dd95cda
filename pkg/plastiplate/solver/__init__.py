from .incremental import IncrementalSolver, evolve, seed_history, step
from .options import SolverOptions
from .scenario import InitialData, Scenario, TimeGrid
from .sweeps import (LadderReport, LadderRun, RefinementReport, ladder,
                     mesh_refinement, time_refinement)

__all__ = [
    'IncrementalSolver', 'evolve', 'seed_history', 'step', 'SolverOptions',
    'InitialData', 'Scenario', 'TimeGrid', 'LadderReport', 'LadderRun',
    'RefinementReport', 'ladder', 'mesh_refinement', 'time_refinement'
]
