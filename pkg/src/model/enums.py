from enum import Enum


class StrategyKind(Enum):
    """
    An enum for the different search strategies
    """
    SDS = 'sds'  # sequential deploy and search
    CDS = 'cds'  # combined deploy and search
    VGS = 'vgs'  # Voronoi greedy search
    TGS = 'tgs'  # true greedy search
    RS = 'rs'    # random search

    @classmethod
    def has_value(cls, value):
        return value in cls._value2member_map_

    @classmethod
    def parse(cls, value: str) -> 'StrategyKind':
        """
        Case-insensitive lookup by value
        :param value: The strategy name (eg. 'CDS' or 'cds')
        :raise ValueError: when the name is unknown
        :return: The matching StrategyKind
        """
        value = value.strip().lower()
        if not cls.has_value(value):
            raise ValueError(f"Invalid strategy kind '{value}'")
        return cls(value)

    def requires_range(self) -> bool:
        return self in (StrategyKind.VGS, StrategyKind.TGS)


class TerminatedBy(Enum):
    """
    Why a run stopped
    """
    THRESHOLD = 'threshold'
    MAX_STEPS = 'max_steps'

    @classmethod
    def has_value(cls, value):
        return value in cls._value2member_map_


class Detection(Enum):
    """
    The sensor detection function used for objectives and perceived densities.
    BETA ignores any range, BETA_TILDE saturates at beta(R), BETA_HAT equals one beyond R.
    """
    BETA = 'beta'
    BETA_TILDE = 'beta_tilde'
    BETA_HAT = 'beta_hat'

    @classmethod
    def has_value(cls, value):
        return value in cls._value2member_map_


class ControlLaw(Enum):
    """
    The motion laws a centroid following strategy can use
    """
    PROPORTIONAL = 'proportional'
    SATURATED = 'saturated'
    CONSTANT_SPEED = 'constant_speed'

    @classmethod
    def has_value(cls, value):
        return value in cls._value2member_map_
