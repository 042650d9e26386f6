"""
:class:`Registrable` gives a base class a registry of named subclasses. heislab registers graph
motifs, point samplers, inequality checkers and report formats, so the CLI and the settings
file can pick each of them by name.
"""

import difflib
import logging
from collections import defaultdict
from typing import Callable, ClassVar, DefaultDict, Dict, List, Optional, Type, TypeVar, cast

from .exceptions import ConfigurationError, RegistryKeyError

logger = logging.getLogger(__name__)

_T = TypeVar("_T")
_RegistrableT = TypeVar("_RegistrableT", bound="Registrable")


def _fullname(c: type) -> str:
    return f"{c.__module__}.{c.__qualname__}"


class Registrable:
    """
    Subclasses of a ``Registrable`` base are registered with ``@Base.register(name)`` and
    looked up with ``Base.by_name(name)``. The registry holds classes, not instances.

    Setting ``default_implementation`` on the base puts that name first in
    :meth:`list_available`; the CLI uses the first name when none is given.

    ::

        class Motif(Registrable):
            default_implementation = "laakso"

        @Motif.register("laakso")
        class LaaksoMotif(Motif):
            ...

        Motif.by_name("laakso")  # LaaksoMotif
    """

    _registry: ClassVar[DefaultDict[type, Dict[str, type]]] = defaultdict(dict)

    default_implementation: Optional[str] = None

    @classmethod
    def register(cls, name: str, exist_ok: bool = False) -> Callable[[Type[_T]], Type[_T]]:
        """
        Class decorator registering the decorated subclass of ``cls`` under ``name``.

        :raises ConfigurationError: if ``name`` is taken and ``exist_ok`` is false.
        """
        registry = Registrable._registry[cls]

        def decorate(subclass: Type[_T]) -> Type[_T]:
            taken = registry.get(name)
            if taken is not None and not exist_ok:
                raise ConfigurationError(
                    f"cannot register {_fullname(subclass)} as '{name}' for {cls.__name__}: "
                    f"{_fullname(taken)} already has that name"
                )
            if taken is not None:
                logger.info("'%s' for %s now refers to %s", name, cls.__name__, _fullname(subclass))
            registry[name] = subclass
            return subclass

        return decorate

    @classmethod
    def by_name(cls: Type[_RegistrableT], name: str) -> Type[_RegistrableT]:
        """
        Returns the subclass registered under ``name``.

        :raises RegistryKeyError: naming the closest registered name, if any, and all of them.
        """
        registry = Registrable._registry[cls]
        if name in registry:
            return cast(Type[_RegistrableT], registry[name])

        available = cls.list_available()
        suggestion = _get_suggestion(name, available)
        hint = f", did you mean '{suggestion}'?" if suggestion else "."
        raise RegistryKeyError(
            f"'{name}' is not a registered name for '{cls.__name__}'{hint}"
            f" Available: {', '.join(available) or '(none)'}."
        )

    @classmethod
    def list_available(cls) -> List[str]:
        """
        Registered names in registration order, with the default first.
        """
        names = list(Registrable._registry[cls])
        default = cls.default_implementation
        if default is None:
            return names
        if default not in names:
            raise ConfigurationError(
                f"default '{default}' of {cls.__name__} is not a registered name"
            )
        return [default] + [n for n in names if n != default]


def _get_suggestion(name: str, available: List[str]) -> Optional[str]:
    # "-" and "_" are easy to mix up in names like "near-geodesic".
    for wrong, right in (("_", "-"), ("-", "_")):
        if name.replace(wrong, right) in available:
            return name.replace(wrong, right)
    by_case = {n.lower(): n for n in available}
    if name.lower() in by_case:
        return by_case[name.lower()]
    close = difflib.get_close_matches(name, available, n=1)
    return close[0] if close else None
