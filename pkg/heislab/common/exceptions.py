from typing import Any, Tuple, Union


class HeislabError(Exception):
    """
    Base class for heislab exceptions.
    """


class ConfigurationError(HeislabError):
    """
    The exception raised when an object or a computation is set up with invalid
    parameters (e.g. a level above the cap, an angle schedule that is too short, ``p < 1``).
    """

    def __reduce__(self) -> Union[str, Tuple[Any, ...]]:
        return type(self), (self.message,)

    def __init__(self, message: str):
        super().__init__()
        self.message = message

    def __str__(self):
        return self.message


class RegistryKeyError(ConfigurationError):
    """
    A configuration error that is raised when attempting to get a class by a registered name
    that doesn't exist in the registry.
    """


class CapExceededError(ConfigurationError):
    """
    Raised when a computation is refused because it would exceed a size cap.
    The message always names the cap.
    """


class DimensionMismatchError(HeislabError, ValueError):
    """
    Raised when the operands of a group or vector operation have different dimensions.
    """


class InvalidAddressError(HeislabError, KeyError):
    """
    Raised when a vertex id or address does not resolve to a vertex of the graph.
    """

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DegenerateConfigurationError(HeislabError, ValueError):
    """
    Raised for inputs where the requested quantity is undefined, such as the angle of a
    zero vector or a fork whose base points coincide.
    """
