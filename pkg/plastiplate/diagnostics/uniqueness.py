from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING

import numpy as np

from plastiplate.structures import PlateGrid, Trajectory
from .monitor import integrate_nodal, pair_layered

if TYPE_CHECKING:
    from plastiplate.solver.options import SolverOptions
    from plastiplate.solver.scenario import Scenario


@dataclass
class UniquenessReport:
    """L∞-in-time, L²-in-space differences of two runs of one scenario.

    Only σ and u₃ are expected to agree; the ū and p columns are
    informational.
    """
    sigma_diff: float
    u3_diff: float
    ubar_diff: float
    p_diff: float
    scale: float
    tol: float
    steps: int

    @property
    def passed(self) -> bool:
        bound = self.tol * self.scale
        return self.sigma_diff <= bound and self.u3_diff <= bound

    def as_dict(self) -> dict:
        out = asdict(self)
        out['passed'] = self.passed
        return out


def compare_trajectories(first: Trajectory,
                         second: Trajectory,
                         grid: PlateGrid,
                         tol: float = 1e-7) -> UniquenessReport:
    """Compare two trajectories on the steps both retained."""
    common = sorted(set(first.steps) & set(second.steps))
    assert common, 'the trajectories share no step'
    sigma_diff = u3_diff = ubar_diff = p_diff = 0.0
    scale = 1.0
    for step in common:
        a, b = first.at_step(step), second.at_step(step)
        ds = a.sigma.values - b.sigma.values
        dp = a.p.values - b.p.values
        sigma_diff = max(sigma_diff, np.sqrt(pair_layered(ds, ds, grid)))
        p_diff = max(p_diff, np.sqrt(pair_layered(dp, dp, grid)))
        u3_diff = max(u3_diff,
                      np.sqrt(integrate_nodal((a.u.u3 - b.u.u3)**2, grid)))
        ubar_diff = max(
            ubar_diff,
            np.sqrt(
                integrate_nodal(np.sum((a.u.ubar - b.u.ubar)**2, -1), grid)))
        scale = max(
            scale,
            1.0 + np.sqrt(pair_layered(a.sigma.values, a.sigma.values, grid)),
            1.0 + np.sqrt(integrate_nodal(a.u.u3**2, grid)))
    return UniquenessReport(
        float(sigma_diff), float(u3_diff), float(ubar_diff), float(p_diff),
        float(scale), tol, len(common))


def uniqueness_check(S: 'Scenario',
                     opts1: 'SolverOptions',
                     opts2: 'SolverOptions',
                     stride: int = 1,
                     tol: float = 1e-7) -> UniquenessReport:
    """Evolve ``S`` along two solver paths and compare (σ, u₃)."""
    from plastiplate.solver.incremental import evolve
    first, _ = evolve(S, opts1, stride)
    second, _ = evolve(S, opts2, stride)
    return compare_trajectories(first, second, S.grid, tol)
