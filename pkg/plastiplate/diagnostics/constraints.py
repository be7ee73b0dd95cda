from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from plastiplate.ops.sym2 import (ArrayLike, YieldSurface, frobenius_inner,
                                  norm_dual, norm_r)
from plastiplate.structures import Trajectory
from .monitor import integrate_layered

if TYPE_CHECKING:
    from plastiplate.solver.scenario import Scenario


def stress_excess(sigma: ArrayLike, K: YieldSurface) -> float:
    """max (|σ|_r − α₀)⁺ over all entries."""
    return float(np.maximum(norm_r(sigma) - K.alpha0, 0.0).max(initial=0.0))


def constraint_excess(traj: Trajectory, K: YieldSurface) -> np.ndarray:
    """Per retained state, the largest violation of the stress constraint."""
    return np.array([stress_excess(s.sigma.values, K) for s in traj])


def flow_gap_density(sigma: ArrayLike, pdot: ArrayLike,
                     alpha0: float) -> np.ndarray:
    """H_r(ṗ) − σ:ṗ, non-negative whenever σ ∈ K_r."""
    return alpha0 * norm_dual(pdot) - frobenius_inner(sigma, pdot)


def norton_hoff_gap(s, alpha0: float, N: int) -> np.ndarray:
    """(s/α₀)^{N−1}(α₀ − s): the gap density of the Norton–Hoff flow at
    |σ|_r = s. Its maximum over s is below α₀/N."""
    s = np.asarray(s, dtype=np.float64)
    return (s / alpha0)**(N - 1) * (alpha0 - s)


class FlowGapSeries(NamedTuple):
    steps: np.ndarray
    signed: np.ndarray
    absolute: np.ndarray
    max_density: np.ndarray
    bound: float


def flow_rule_gap(traj: Trajectory, S: 'Scenario') -> FlowGapSeries:
    """∫_Ω (H_r(ṗ) − σ:ṗ) between consecutive retained states.

    ṗ is the difference quotient over the time elapsed between the two
    states, so a strided trajectory yields averaged rates.
    """
    grid, alpha0 = S.grid, S.trunc.alpha0
    steps, signed, absolute, peak = [], [], [], []
    for prev, cur in zip(traj.states, traj.states[1:]):
        dt = cur.time - prev.time
        pdot = (cur.p.values - prev.p.values) / dt
        density = flow_gap_density(cur.sigma.values, pdot, alpha0)
        steps.append(cur.step)
        signed.append(integrate_layered(density, grid))
        absolute.append(integrate_layered(np.abs(density), grid))
        peak.append(float(density.max()))
    return FlowGapSeries(
        np.array(steps, dtype=int), np.array(signed), np.array(absolute),
        np.array(peak), alpha0 / S.trunc.N)
