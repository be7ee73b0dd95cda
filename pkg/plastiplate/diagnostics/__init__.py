from .constraints import (FlowGapSeries, constraint_excess, flow_gap_density,
                          flow_rule_gap, norton_hoff_gap, stress_excess)
from .duality import (DualityResult, cutoff_function, duality_identity,
                      duality_pairing_density, duality_residual)
from .energy import energy_report
from .monitor import (DiagnosticsLog, EnergyLedger, StepMonitor, StepRecord,
                      integrate_layered, integrate_nodal, pair_layered)
from .regularity import (RegularityProbe, RegularityReport,
                         regularity_monitor, thickness_quotients)
from .uniqueness import (UniquenessReport, compare_trajectories,
                         uniqueness_check)

__all__ = [
    'FlowGapSeries', 'constraint_excess', 'flow_gap_density', 'flow_rule_gap',
    'norton_hoff_gap', 'stress_excess', 'DualityResult', 'cutoff_function',
    'duality_identity', 'duality_pairing_density', 'duality_residual',
    'energy_report', 'DiagnosticsLog', 'EnergyLedger', 'StepMonitor',
    'StepRecord', 'integrate_layered', 'integrate_nodal', 'pair_layered',
    'RegularityProbe', 'RegularityReport', 'regularity_monitor',
    'thickness_quotients', 'UniquenessReport', 'compare_trajectories',
    'uniqueness_check'
]
