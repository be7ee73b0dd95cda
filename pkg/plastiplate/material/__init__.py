from .elasticity import (Elasticity, apply_A, apply_C, coercivity_constants,
                         elastic_energy_density)
from .return_map import (consistent_tangent, elastic_tangent,
                         incremental_energy_density, plastic_increment,
                         return_map)

__all__ = [
    'Elasticity', 'apply_A', 'apply_C', 'coercivity_constants',
    'elastic_energy_density', 'consistent_tangent', 'elastic_tangent',
    'incremental_energy_density', 'plastic_increment', 'return_map'
]
