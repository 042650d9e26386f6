from ._det_hash import det_hash
from .aliases import IndexArray, PathOrStr
from .registrable import Registrable
from .tqdm import Tqdm
from .util import chunked_map, resolve_seed, spawn_generators

__all__ = [
    "PathOrStr",
    "IndexArray",
    "det_hash",
    "Registrable",
    "Tqdm",
    "chunked_map",
    "resolve_seed",
    "spawn_generators",
]
