import bz2
import csv
import dataclasses
import gzip
import json
import logging
import lzma
import math
from abc import abstractmethod
from enum import Enum
from os import PathLike
from pathlib import Path
from typing import IO, Any, Callable, Dict, Generic, List, Optional, Sequence, TypeVar

import numpy as np

from .common.aliases import PathOrStr
from .common._det_hash import det_hash
from .common.exceptions import ConfigurationError
from .common.registrable import Registrable
from .version import VERSION

T = TypeVar("T")

TOOL_NAME = "heislab"

logger = logging.getLogger(__name__)


class Format(Registrable, Generic[T]):
    """
    Formats write report artifacts to files and read them back out.
    """

    VERSION: int = NotImplemented
    """
    Formats can have versions. A change in how a format writes bumps its version.
    """

    default_implementation = "json"

    @abstractmethod
    def write(self, artifact: T, path: PathOrStr):
        """Writes the ``artifact`` to the file at ``path``."""
        raise NotImplementedError()

    @abstractmethod
    def read(self, path: PathOrStr) -> T:
        """Reads an artifact from the file at ``path`` and returns it."""
        raise NotImplementedError()


_OPEN_FUNCTIONS: Dict[Optional[str], Callable[[PathLike, str], IO]] = {
    None: open,
    "None": open,
    "none": open,
    "null": open,
    "gz": gzip.open,  # type: ignore
    "gzip": gzip.open,  # type: ignore
    "bz": bz2.open,  # type: ignore
    "bz2": bz2.open,  # type: ignore
    "bzip": bz2.open,  # type: ignore
    "bzip2": bz2.open,  # type: ignore
    "lzma": lzma.open,
}

_NON_FINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def jsonable(o: Any) -> Any:
    """
    Converts ``o`` to plain JSON types. Numpy scalars and arrays become numbers and lists,
    dataclasses become dicts, enums their values, and non-finite floats the strings
    ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(o, Enum):
        return jsonable(o.value)
    if isinstance(o, (bool, np.bool_)):
        return bool(o)
    if isinstance(o, (int, np.integer)):
        return int(o)
    if isinstance(o, (float, np.floating)):
        value = float(o)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(o, np.ndarray):
        return [jsonable(x) for x in o.tolist()]
    if dataclasses.is_dataclass(o) and not isinstance(o, type):
        return {
            f.name: jsonable(getattr(o, f.name))
            for f in dataclasses.fields(o)
            if not f.name.startswith("_")
        }
    if isinstance(o, dict):
        return {str(k): jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple, set, frozenset)):
        items = sorted(o) if isinstance(o, (set, frozenset)) else o
        return [jsonable(x) for x in items]
    if isinstance(o, Path):
        return str(o)
    if o is None or isinstance(o, str):
        return o
    raise TypeError(f"Object of type {type(o)} is not JSON serializable")


def parse_non_finite(o: Any) -> Any:
    """Inverse of the non-finite encoding in :func:`jsonable`, applied recursively."""
    if isinstance(o, str) and o in _NON_FINITE:
        return _NON_FINITE[o]
    if isinstance(o, dict):
        return {k: parse_non_finite(v) for k, v in o.items()}
    if isinstance(o, list):
        return [parse_non_finite(v) for v in o]
    return o


@Format.register("json")
class JsonFormat(Format[Any]):
    """
    Writes the artifact as a single JSON document with sorted keys, an indent of 2, and a
    trailing newline, so that equal artifacts produce equal bytes. Optionally, it can
    compress the data.
    """

    VERSION = 1

    def __init__(self, compress: Optional[str] = None):
        try:
            self.open = _OPEN_FUNCTIONS[compress]
        except KeyError:
            raise ConfigurationError(f"The {compress} compression format does not exist.")

    @staticmethod
    def dumps(artifact: Any) -> str:
        return json.dumps(jsonable(artifact), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, artifact: Any, path: PathOrStr):
        with self.open(Path(path), "wt") as f:
            f.write(self.dumps(artifact))
        logger.debug("wrote JSON to %s", path)

    def read(self, path: PathOrStr) -> Any:
        with self.open(Path(path), "rt") as f:
            return parse_non_finite(json.load(f))


@dataclasses.dataclass
class Table:
    """Rows of a CSV artifact under a header."""

    columns: List[str]
    rows: Sequence[Sequence[Any]]

    def __len__(self) -> int:
        return len(self.rows)


@Format.register("csv")
class CsvFormat(Format[Table]):
    """
    Writes a :class:`Table` as a CSV file with a header line. Floats are written with
    ``repr`` so that they round-trip exactly.
    """

    VERSION = 1

    def __init__(self, compress: Optional[str] = None):
        try:
            self.open = _OPEN_FUNCTIONS[compress]
        except KeyError:
            raise ConfigurationError(f"The {compress} compression format does not exist.")

    @staticmethod
    def _cell(value: Any) -> Any:
        if isinstance(value, (float, np.floating)):
            return repr(float(value))
        if isinstance(value, np.integer):
            return int(value)
        return value

    def write(self, artifact: Table, path: PathOrStr):
        with self.open(Path(path), "wt") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(artifact.columns)
            for row in artifact.rows:
                if len(row) != len(artifact.columns):
                    raise ConfigurationError(
                        f"row {list(row)} has {len(row)} cells for {len(artifact.columns)} columns"
                    )
                writer.writerow([self._cell(v) for v in row])
        logger.debug("wrote %d rows to %s", len(artifact.rows), path)

    def read(self, path: PathOrStr) -> Table:
        with self.open(Path(path), "rt") as f:
            reader = csv.reader(f)
            try:
                columns = next(reader)
            except StopIteration:
                raise ConfigurationError(f"{path} is empty; expected a CSV header")
            return Table(columns, [row for row in reader])


def envelope(
    command: str,
    config: Dict[str, Any],
    seed: int,
    result: Any,
    duration_s: Optional[float] = None,
) -> Dict[str, Any]:
    """
    Wraps a result in the report envelope shared by every command.
    ``duration_s`` is ``None`` when timing is not recorded.
    """
    plain_config = jsonable(config)
    return {
        "tool": TOOL_NAME,
        "version": VERSION,
        "command": command,
        "config": plain_config,
        "config_hash": det_hash(plain_config),
        "seed": seed,
        "duration_s": duration_s,
        "result": jsonable(result),
    }
