from enum import Enum


class AdvancedEnum(Enum):
    """Define an enumeration class."""

    @classmethod
    def get(cls, value):
        """Get the key through a value."""
        for k in cls:
            if k.value == value:
                return k

        raise KeyError(f'Cannot get key by value "{value}" of {cls}')

    @classmethod
    def values(cls):
        return [k.value for k in cls]


class Edge(AdvancedEnum):
    """Edges of the rectangle ω = (0, Lx) × (0, Ly)."""
    LEFT = 'left'
    RIGHT = 'right'
    BOTTOM = 'bottom'
    TOP = 'top'


class LinearSolver(AdvancedEnum):
    DIRECT = 'direct'
    CG = 'cg'


class InitialGuess(AdvancedEnum):
    """Starting point of the Newton iteration of a time step."""
    PREVIOUS = 'previous'
    ELASTIC = 'elastic'
    ZERO = 'zero'


class DofOrder(AdvancedEnum):
    NATURAL = 'natural'
    REVERSED = 'reversed'


class BuiltinScenario(AdvancedEnum):
    """Names of the shipped benchmark scenarios.

    Further names are appended with ``aenum.extend_enum`` when a scenario is
    registered, see :func:`plastiplate.scenarios.register_scenario`.
    """
    QUIESCENT = 'quiescent'
    ELASTIC_BEND = 'elastic_bend'
    PLASTIC_BEND = 'plastic_bend'
    INERTIAL_RING = 'inertial_ring'
    STATIC_F = 'static_f'


class ExitCode(AdvancedEnum):
    SUCCESS = 0
    ASSERTION = 1
    CONFIG = 2


# 2×2 symmetric matrices are stored as (a11, a22, a12)
SYM2_COMPONENTS = ('11', '22', '12')
