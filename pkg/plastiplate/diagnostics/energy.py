from typing import TYPE_CHECKING, List

from plastiplate.structures import Trajectory
from .monitor import EnergyLedger, StepMonitor

if TYPE_CHECKING:
    from plastiplate.solver.scenario import Scenario


def energy_report(traj: Trajectory, S: 'Scenario') -> List[EnergyLedger]:
    """Recompute the energy balance of a stored trajectory.

    The balance telescopes over steps, so the trajectory must hold every
    step from the seed on (``stride=1``).

    Raises:
        ValueError: If the trajectory is strided or does not start at the
            seed.
    """
    if len(traj) == 0 or traj[0].step != 0 or not traj.is_dense:
        raise ValueError('energy_report needs a dense trajectory starting '
                         'at step 0')
    monitor = StepMonitor(S, traj[0])
    for prev, cur in zip(traj.states, traj.states[1:]):
        monitor.record(prev, cur)
    return [r.ledger for r in monitor.log]
