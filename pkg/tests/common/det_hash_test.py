from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List

import numpy as np

from heislab.common._det_hash import det_hash


@dataclass
class _Sweep:
    M: float
    levels: List[int]


class _Mode(Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


def test_plain_objects():
    class C:
        def __init__(self, x: int):
            self.x = x

    assert det_hash(C(10)) == det_hash(C(10))
    assert det_hash(C(20)) != det_hash(C(10))


def test_dict_order_does_not_matter():
    a = {"level": 3, "M": 17.0, "motif": "laakso"}
    b = {"motif": "laakso", "M": 17.0, "level": 3}
    assert det_hash(a) == det_hash(b)
    assert det_hash(a) != det_hash({**a, "level": 4})


def test_nested_configs():
    a = {"levels": [1, 2, 3], "extra": {"x": 1, "y": 2}}
    b = {"extra": {"y": 2, "x": 1}, "levels": [1, 2, 3]}
    assert det_hash(a) == det_hash(b)
    assert det_hash(a) != det_hash({**a, "levels": [3, 2, 1]})


def test_numpy_values():
    assert det_hash({"M": np.float64(17.0)}) == det_hash({"M": 17.0})
    assert det_hash(np.int64(3)) == det_hash(3)
    a = np.arange(6).reshape(2, 3)
    assert det_hash(a) == det_hash(a.copy())
    assert det_hash(a) != det_hash(a.T)
    assert det_hash(a) != det_hash(a.astype(np.float64))


def test_dataclasses_enums_and_paths():
    assert det_hash(_Sweep(17.0, [1, 2])) == det_hash(_Sweep(17.0, [1, 2]))
    assert det_hash(_Sweep(17.0, [1, 2])) != det_hash(_Sweep(3.0, [1, 2]))
    assert det_hash(_Sweep(17.0, [1, 2])) != det_hash({"M": 17.0, "levels": [1, 2]})
    assert det_hash(_Mode.EXACT) != det_hash(_Mode.SAMPLED)
    assert det_hash(Path("out") / "a.json") == det_hash(Path("out/a.json"))
