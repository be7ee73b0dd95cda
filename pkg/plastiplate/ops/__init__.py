from .kinematics import (StrainOperator, divdiv, divergence, from_moments,
                         gradient, hessian, kl_strain, moment_first,
                         moment_zero, perp_part, sym_grad)
from .potentials import (F_lambda, NortonHoffParams, TruncationParams,
                         conjugate_numeric, dF_lambda, dphi_N, dpsi_lambda,
                         flow_factor, phi_N, psi_lambda)
from .stencils import GridDifferences
from .sym2 import (Sym2, YieldSurface, dev_r, frobenius_inner,
                   frobenius_norm, in_yield_set, inner_r, lift_dual,
                   norm_dual, norm_r, support_Hr, trace)

__all__ = [
    'StrainOperator', 'divdiv', 'divergence', 'from_moments', 'gradient',
    'hessian', 'kl_strain', 'moment_first', 'moment_zero', 'perp_part',
    'sym_grad', 'F_lambda', 'NortonHoffParams', 'TruncationParams',
    'conjugate_numeric', 'dF_lambda', 'dphi_N', 'dpsi_lambda', 'flow_factor',
    'phi_N', 'psi_lambda', 'GridDifferences', 'Sym2', 'YieldSurface', 'dev_r',
    'frobenius_inner', 'frobenius_norm', 'in_yield_set', 'inner_r',
    'lift_dual', 'norm_dual', 'norm_r', 'support_Hr', 'trace'
]
