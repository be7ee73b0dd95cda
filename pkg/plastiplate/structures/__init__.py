from .base_data_element import BaseDataElement
from .fields import KLDisplacement, LayeredField
from .plate_grid import PlateGrid, check_layer_rule, gauss_layers
from .plate_state import PlateState, Trajectory, make_state

__all__ = [
    'BaseDataElement', 'KLDisplacement', 'LayeredField', 'PlateGrid',
    'check_layer_rule', 'gauss_layers', 'PlateState', 'Trajectory',
    'make_state'
]
