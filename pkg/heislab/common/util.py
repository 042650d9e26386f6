import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from .exceptions import ConfigurationError

T = TypeVar("T")

SEED_ENV_VAR = "HEISLAB_SEED"


def _parse_bool(value: Union[bool, str]) -> bool:
    if isinstance(value, bool):
        return value
    if value in {"1", "true", "True", "TRUE"}:
        return True
    return False


def resolve_seed(seed: Optional[int]) -> int:
    """
    Returns the seed to use for a run. The ``HEISLAB_SEED`` environment variable
    takes precedence over the given value.
    """
    from_env = os.environ.get(SEED_ENV_VAR)
    if from_env is not None and from_env.strip():
        try:
            seed = int(from_env)
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV_VAR} must be an integer, got '{from_env}'")
    if seed is None:
        seed = 1
    if seed < 0:
        raise ConfigurationError(f"seed must be nonnegative, got {seed}")
    return seed


def chunk_bounds(total: int, chunk_size: int) -> List[Tuple[int, int]]:
    """
    Splits ``range(total)`` into consecutive ``(start, stop)`` blocks of at most ``chunk_size``.
    """
    if chunk_size <= 0:
        raise ConfigurationError(f"chunk size must be positive, got {chunk_size}")
    return [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """
    One independent counter-based (Philox) stream per chunk, derived from ``seed``.
    The stream of chunk ``c`` only depends on ``(seed, c)``.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def chunked_map(
    fn: Callable[[int], T], n_chunks: int, threads: int = 1, progress: Optional[str] = None
) -> List[T]:
    """
    Calls ``fn(chunk_index)`` for every chunk, possibly on a thread pool, and returns
    the results in chunk order. Reducing the returned list in order makes the
    aggregate independent of ``threads``.
    """
    if threads < 1:
        raise ConfigurationError(f"threads must be at least 1, got {threads}")

    indices: Sequence[int] = range(n_chunks)
    if threads == 1 or n_chunks <= 1:
        iterator: Iterator[T] = map(fn, indices)
        if progress is not None:
            from .tqdm import Tqdm

            iterator = Tqdm.tqdm(iterator, total=n_chunks, desc=progress)
        return list(iterator)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        mapped: Iterator[T] = pool.map(fn, indices)
        if progress is not None:
            from .tqdm import Tqdm

            mapped = Tqdm.tqdm(mapped, total=n_chunks, desc=progress)
        return list(mapped)
