import os
from typing import Sequence, Union

import numpy as np

PathOrStr = Union[str, os.PathLike]

IndexArray = Union[int, Sequence[int], np.ndarray]
"""Anything numpy can turn into an integer index array."""
