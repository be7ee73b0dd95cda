from .conjugate import conjugate_sup, search_radius
from .dense import DenseIncrementalProblem, OracleResult, brute_minimize
from .pointwise import PointwiseUpdate, pointwise_plastic_update

__all__ = [
    'conjugate_sup', 'search_radius', 'DenseIncrementalProblem',
    'OracleResult', 'brute_minimize', 'PointwiseUpdate',
    'pointwise_plastic_update'
]
