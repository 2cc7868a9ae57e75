"""
Exceptions raised by the search simulation.
Every input problem is a ValueError subclass so callers that only know about ValueError keep working.
"""
from typing import Optional


class SearchSimError(Exception):
    """
    Root of all simulation specific errors
    """
    pass


class DuplicatePositionsError(SearchSimError, ValueError):
    """
    Two robots occupy the same point (within the duplicate tolerance)
    """

    def __init__(self, i: int, j: int):
        super().__init__(f"Robots {i} and {j} coincide")
        self.i = i
        self.j = j


class OutOfDomainError(SearchSimError, ValueError):
    """
    A robot lies outside of the search rectangle
    """

    def __init__(self, i: int, point):
        super().__init__(f"Robot {i} at ({point[0]}, {point[1]}) lies outside the domain")
        self.i = i


class NegativeDistanceError(SearchSimError, ValueError):
    pass


class MissingRangeError(SearchSimError, ValueError):
    """
    An operation needs a sensor range limit but the sensor model has none
    """

    def __init__(self, what: str = "this operation"):
        super().__init__(f"A sensor range is required for {what}")


class InvalidCombinationError(SearchSimError, ValueError):
    pass


class ConfigParseError(SearchSimError, ValueError):
    """
    The experiment document is not well-formed
    """

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        location = ""
        if line is not None:
            location += f"line {line}"
        if key is not None:
            location += f"{', ' if location else ''}key '{key}'"
        super().__init__(f"{location}: {message}" if location else message)
        self.line = line
        self.key = key


class ConfigValidationError(SearchSimError, ValueError):
    """
    A configuration value is outside of its allowed bounds
    """

    def __init__(self, field: str, bound: str, value=None):
        super().__init__(f"Invalid value for '{field}' ({value!r}): must satisfy {bound}")
        self.field = field
        self.bound = bound
        self.value = value


class OutputError(SearchSimError, OSError):
    pass
