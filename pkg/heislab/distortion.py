"""
Bi-Lipschitz distortion of maps between finite metric spaces.

A map from a source space to a target space is given by aligning two :class:`MetricSpace`
objects: point ``i`` of the source is sent to point ``i`` of the target. Every unordered pair
contributes the ratio ``target distance / source distance`` and the distortion is the largest
ratio over the smallest.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .common.exceptions import (
    CapExceededError,
    ConfigurationError,
    DegenerateConfigurationError,
    DimensionMismatchError,
)
from .common.util import chunk_bounds, chunked_map, spawn_generators
from .embedder import DEFAULT_M, EmbeddedMap, angle_schedule, embed
from .heis_core import HPoint, distance
from .laakso import LaaksoGraph, build_graph, copy_membership, graph_distance

logger = logging.getLogger(__name__)

DEFAULT_PAIR_CAP = 10**8

BLOCK_ENTRIES = 2**22

SAMPLE_CHUNK = 2**16


class MetricSpace(ABC):
    """A finite metric space whose points are indexed ``0..len - 1``."""

    @abstractmethod
    def __len__(self) -> int:
        raise NotImplementedError()

    @abstractmethod
    def paired(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Distances between points ``u`` and ``v``, broadcasting."""
        raise NotImplementedError()

    def distances(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """The ``len(rows) x len(cols)`` block of the distance matrix."""
        return self.paired(np.asarray(rows)[:, None], np.asarray(cols)[None, :])


class GraphMetric(MetricSpace):
    def __init__(self, graph: LaaksoGraph):
        self.graph = graph

    def __len__(self) -> int:
        return self.graph.n_vertices

    def paired(self, u, v):
        return graph_distance(self.graph, u, v).astype(np.float64)


class HeisenbergMetric(MetricSpace):
    """Points of :math:`H_d` under the Koranyi metric."""

    def __init__(self, points: HPoint):
        if len(points.batch_shape) != 1:
            raise DimensionMismatchError(
                f"expected a one-dimensional batch of points, got batch shape {points.batch_shape}"
            )
        self.points = points

    def __len__(self) -> int:
        return len(self.points)

    def paired(self, u, v):
        return distance(self.points[np.asarray(u)], self.points[np.asarray(v)])


class MatrixMetric(MetricSpace):
    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"a distance matrix must be square, got {matrix.shape}")
        self.matrix = matrix

    def __len__(self) -> int:
        return len(self.matrix)

    def paired(self, u, v):
        return self.matrix[np.asarray(u), np.asarray(v)]


@dataclass
class DistortionReport:
    mode: str
    pairs: int
    min_ratio: float
    max_ratio: float
    distortion: float
    witness_pairs: Dict[str, Tuple[int, int]]
    seed: Optional[int] = None
    samples: Optional[int] = None

    @property
    def is_lower_bound(self) -> bool:
        return self.mode == "sampled"


@dataclass
class _Extremes:
    pairs: int = 0
    min_ratio: float = math.inf
    min_pair: Tuple[int, int] = (-1, -1)
    max_ratio: float = -math.inf
    max_pair: Tuple[int, int] = (-1, -1)

    def merge(self, other: "_Extremes"):
        # Strict comparisons keep the earliest witness.
        self.pairs += other.pairs
        if other.min_ratio < self.min_ratio:
            self.min_ratio, self.min_pair = other.min_ratio, other.min_pair
        if other.max_ratio > self.max_ratio:
            self.max_ratio, self.max_pair = other.max_ratio, other.max_pair


def _extremes(
    source: MetricSpace, images: MetricSpace, u: np.ndarray, v: np.ndarray
) -> _Extremes:
    if len(u) == 0:
        return _Extremes()
    d_source = source.paired(u, v)
    if np.any(d_source <= 0):
        i = int(np.argmax(d_source <= 0))
        raise DegenerateConfigurationError(
            f"source points {int(u[i])} and {int(v[i])} coincide; distortion is undefined"
        )
    ratio = images.paired(u, v) / d_source
    lo, hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    return _Extremes(
        pairs=len(u),
        min_ratio=float(ratio[lo]),
        min_pair=(int(u[lo]), int(v[lo])),
        max_ratio=float(ratio[hi]),
        max_pair=(int(u[hi]), int(v[hi])),
    )


def _report(mode: str, result: _Extremes, **extra) -> DistortionReport:
    if result.min_ratio <= 0:
        value = math.inf
    else:
        value = result.max_ratio / result.min_ratio
    return DistortionReport(
        mode=mode,
        pairs=result.pairs,
        min_ratio=result.min_ratio,
        max_ratio=result.max_ratio,
        distortion=value,
        witness_pairs={"min": result.min_pair, "max": result.max_pair},
        **extra,
    )


def measure(
    source: MetricSpace,
    images: MetricSpace,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 1,
    threads: int = 1,
    pair_cap: int = DEFAULT_PAIR_CAP,
) -> DistortionReport:
    """
    Distortion of the map sending point ``i`` of ``source`` to point ``i`` of ``images``.

    ``mode="exact"`` visits every unordered pair and refuses to run above ``pair_cap`` pairs.
    ``mode="sampled"`` draws ``samples`` random pairs and yields a lower bound. Images that
    coincide for distinct sources give an infinite distortion.
    """
    n_points = len(source)
    if len(images) != n_points:
        raise DimensionMismatchError(
            f"{n_points} source points but {len(images)} images; they must be aligned"
        )
    if n_points < 2:
        raise DegenerateConfigurationError("distortion needs at least two points")

    if mode == "exact":
        total = n_points * (n_points - 1) // 2
        if total > pair_cap:
            raise CapExceededError(
                f"{total} pairs is above the exact pair cap of {pair_cap}; use sampling"
            )
        blocks = chunk_bounds(n_points, max(1, BLOCK_ENTRIES // n_points))

        def visit(index: int) -> _Extremes:
            lo, hi = blocks[index]
            rows = np.arange(lo, hi)
            counts = n_points - 1 - rows
            u = np.repeat(rows, counts)
            offset = np.arange(len(u)) - np.repeat(np.cumsum(counts) - counts, counts)
            return _extremes(source, images, u, u + 1 + offset)

        if len(blocks) == 1:
            parts = [visit(0)]
        else:
            parts = chunked_map(
                visit, len(blocks), threads=threads, progress="distortion: exact pairs"
            )
        result = _Extremes()
        for part in parts:
            result.merge(part)
        return _report("exact", result)

    if mode == "sampled":
        if samples < 1:
            raise ConfigurationError(f"samples must be positive, got {samples}")
        bounds = chunk_bounds(samples, SAMPLE_CHUNK)
        generators = spawn_generators(seed, len(bounds))

        def draw(index: int) -> _Extremes:
            lo, hi = bounds[index]
            rng = generators[index]
            u = rng.integers(0, n_points, size=hi - lo)
            v = (u + 1 + rng.integers(0, n_points - 1, size=hi - lo)) % n_points
            return _extremes(source, images, u, v)

        result = _Extremes()
        for part in chunked_map(draw, len(bounds), threads=threads):
            result.merge(part)
        return _report("sampled", result, seed=seed, samples=samples)

    raise ConfigurationError(f"unknown distortion mode '{mode}', expected 'exact' or 'sampled'")


def paper_curve(n: int, M: float = DEFAULT_M) -> float:
    """The growth shape :math:`(M + n)^{1/4} \\sqrt{\\log_2(M + n)}` of the distortion."""
    if n < 1:
        raise ConfigurationError(f"the distortion curve is defined for n >= 1, got {n}")
    return (M + n) ** 0.25 * math.sqrt(math.log2(M + n))


def measure_embedding(
    f: EmbeddedMap,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 1,
    threads: int = 1,
    pair_cap: int = DEFAULT_PAIR_CAP,
) -> DistortionReport:
    return measure(
        GraphMetric(f.graph),
        HeisenbergMetric(f.points()),
        mode=mode,
        samples=samples,
        seed=seed,
        threads=threads,
        pair_cap=pair_cap,
    )


def restricted_lower_ratio(
    f: EmbeddedMap, exact_level: int = 3, samples: int = 100_000, seed: int = 1
) -> float:
    """
    Smallest ``d(f(x), f(y)) / d_G(x, y)`` over pairs lying in different top-level copies of
    :math:`G_{n-1}`. Every such pair is visited up to level ``exact_level``; above it ``samples``
    random pairs are drawn.
    """
    g = f.graph
    masks = copy_membership(g)
    images = HeisenbergMetric(f.points())
    source = GraphMetric(g)
    n_vertices = g.n_vertices

    if g.level <= exact_level:
        best = math.inf
        everyone = np.arange(n_vertices)
        for lo, hi in chunk_bounds(n_vertices, max(1, BLOCK_ENTRIES // n_vertices)):
            rows = everyone[lo:hi, None]
            cols = everyone[None, :]
            apart = (masks[rows] & masks[cols]) == 0
            if not np.any(apart):
                continue
            u, v = np.broadcast_arrays(rows, cols)
            u, v = u[apart], v[apart]
            best = min(best, float(np.min(images.paired(u, v) / source.paired(u, v))))
        return best

    rng = spawn_generators(seed, 1)[0]
    best = math.inf
    for lo, hi in chunk_bounds(samples, SAMPLE_CHUNK):
        u = rng.integers(0, n_vertices, size=hi - lo)
        v = rng.integers(0, n_vertices, size=hi - lo)
        apart = (masks[u] & masks[v]) == 0
        if np.any(apart):
            u, v = u[apart], v[apart]
            best = min(best, float(np.min(images.paired(u, v) / source.paired(u, v))))
    return best


@dataclass
class SweepRow:
    level: int
    M: float
    mode: str
    distortion: float
    curve: float
    ratio: float
    pairs: int
    report: DistortionReport = field(repr=False)


def sweep(
    levels: Sequence[int],
    M: float = DEFAULT_M,
    samples: int = 100_000,
    seed: int = 1,
    threads: int = 1,
    pair_cap: int = DEFAULT_PAIR_CAP,
    level_cap: int = 6,
    motif: str = "laakso",
) -> List[SweepRow]:
    """
    Distortion of the double-diamond embedding at each level, next to the growth curve. Levels
    whose pair count fits under ``pair_cap`` are measured exactly, the others by sampling.
    """
    rows = []
    for n in levels:
        if n < 1:
            raise ConfigurationError(f"sweep levels must be at least 1, got {n}")
        g = build_graph(n, motif=motif, level_cap=level_cap)
        f = embed(g, angle_schedule(M, n))
        total = g.n_vertices * (g.n_vertices - 1) // 2
        mode = "exact" if total <= pair_cap else "sampled"
        report = measure_embedding(
            f, mode=mode, samples=samples, seed=seed, threads=threads, pair_cap=pair_cap
        )
        curve = paper_curve(n, M)
        logger.info("level %d: distortion %.6g (%s)", n, report.distortion, mode)
        rows.append(
            SweepRow(
                level=n,
                M=M,
                mode=mode,
                distortion=report.distortion,
                curve=curve,
                ratio=report.distortion / curve,
                pairs=report.pairs,
                report=report,
            )
        )
    return rows
