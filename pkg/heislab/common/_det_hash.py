"""
Deterministic fingerprints of run configurations. A report's ``config_hash`` is
:func:`det_hash` of the config that produced it.
"""

import dataclasses
import hashlib
from enum import Enum
from pathlib import PurePath
from typing import Any

import base58
import dill
import numpy as np


def _canonical(o: Any) -> Any:
    if isinstance(o, dict):
        return tuple((k, _canonical(o[k])) for k in sorted(o, key=str))
    if type(o) in (list, tuple):
        return type(o)(_canonical(v) for v in o)
    if isinstance(o, np.ndarray):
        return ("ndarray", o.dtype.str, o.shape, o.tobytes())
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Enum):
        return (type(o).__qualname__, _canonical(o.value))
    if isinstance(o, PurePath):
        return str(o)
    if isinstance(o, type):
        return (o.__module__, o.__qualname__)
    if dataclasses.is_dataclass(o):
        fields = {f.name: getattr(o, f.name) for f in dataclasses.fields(o)}
        return (type(o).__qualname__, _canonical(fields))
    if hasattr(o, "__dict__") and not callable(o):
        return (type(o).__module__, type(o).__qualname__, _canonical(vars(o)))
    return o


def det_hash(o: Any) -> str:
    """
    Returns a deterministic base58 hash of ``o``.

    Dict keys are sorted. Dataclasses and plain objects hash by their class name and fields.
    Numpy scalars hash like the Python numbers they hold, and arrays by dtype, shape and
    contents. Whatever remains, functions included, is pickled with :mod:`dill`.
    """
    payload = dill.dumps(_canonical(o), protocol=4)
    return base58.b58encode(hashlib.blake2b(payload).digest()).decode()
