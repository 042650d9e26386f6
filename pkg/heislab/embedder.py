"""
The double-diamond embedding of Laakso graphs into :math:`H_1`.

Every copy of :math:`G_1` is laid out in the plane as a segment, a diamond whose edges make an
angle :math:`\\theta` with the copy's axis, and another segment. The copies created at
substitution step ``j`` use the angle :math:`\\theta_j`, so the planar span of a copy of
:math:`G_k` inside :math:`G_n` is :math:`\\prod_{j=n-k+1}^{n} (2 + 4\\cos\\theta_j)` and every edge
ends up as a unit segment. The vertical coordinate of a vertex is the signed area swept from the
origin along a monotone path to it, which makes every edge image a horizontal unit segment.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .common.exceptions import ConfigurationError, DegenerateConfigurationError
from .common.util import chunk_bounds, spawn_generators
from .format import Table
from .heis_core import HPoint, symplectic
from .laakso import (
    SPAN,
    LaaksoGraph,
    copy_membership,
    copy_terminals,
    developed_path,
    distances_from,
    fork_points,
    graph_distance,
    is_series,
    sample_geodesics,
)

logger = logging.getLogger(__name__)

ANGLE_CAP = math.pi / 3
"""Largest admissible diamond angle. Up to it the layout of a motif does not overlap itself."""

DEFAULT_M = 17.0

DEFAULT_LIMIT_TERMS = 10**6


def _schedule_angle(M: float, j: np.ndarray) -> np.ndarray:
    return 1.0 / (np.sqrt(M + j) * np.log2(M + j))


@dataclass(frozen=True)
class AngleSchedule:
    """
    The diamond angles :math:`\\theta_1 \\geq \\theta_2 \\geq \\dots`. ``M`` is ``None`` when the
    angles were given explicitly.
    """

    thetas: Tuple[float, ...]
    M: Optional[float] = None

    def __post_init__(self):
        thetas = tuple(float(t) for t in self.thetas)
        object.__setattr__(self, "thetas", thetas)
        if any(not math.isfinite(t) or t < 0 for t in thetas):
            raise ConfigurationError(f"angles must be finite and nonnegative, got {thetas}")
        if any(b > a for a, b in zip(thetas, thetas[1:])):
            raise ConfigurationError(f"angles must be non-increasing, got {thetas}")
        if thetas and thetas[0] > ANGLE_CAP:
            raise ConfigurationError(
                f"theta_1 = {thetas[0]} is above the angle cap pi/3 = {ANGLE_CAP}"
            )

    @classmethod
    def from_angles(cls, angles: Sequence[float]) -> "AngleSchedule":
        return cls(tuple(angles))

    def __len__(self) -> int:
        return len(self.thetas)

    def theta(self, j: int) -> float:
        """:math:`\\theta_j`, one-based."""
        if not 1 <= j <= len(self.thetas):
            raise ConfigurationError(f"the schedule has no angle theta_{j}")
        return self.thetas[j - 1]

    @property
    def spans(self) -> np.ndarray:
        """Planar source-sink span :math:`2 + 4\\cos\\theta_j` of a motif at each step."""
        return 2.0 + 4.0 * np.cos(np.asarray(self.thetas, dtype=np.float64))


def angle_schedule(M: float, n: int) -> AngleSchedule:
    """
    :math:`\\theta_j = 1 / (\\sqrt{M + j} \\log_2(M + j))` for ``j = 1..n``.
    """
    if not M >= 2:
        raise ConfigurationError(f"M must be at least 2, got {M}")
    if n < 0:
        raise ConfigurationError(f"the number of angles must be nonnegative, got {n}")
    thetas = _schedule_angle(float(M), np.arange(1, n + 1, dtype=np.float64))
    return AngleSchedule(tuple(thetas.tolist()), M=float(M))


def limit_scale_constant(M: float, terms: int = DEFAULT_LIMIT_TERMS) -> float:
    """
    :math:`L = \\prod_{j \\geq 1} 6 / (2 + 4\\cos\\theta_j)`. The first ``terms`` factors are
    multiplied out and the rest is bounded by the integral of :math:`\\theta_j^2 / 3`.
    """
    if not M >= 2:
        raise ConfigurationError(f"M must be at least 2, got {M}")
    if terms < 1:
        raise ConfigurationError(f"terms must be positive, got {terms}")
    theta = _schedule_angle(float(M), np.arange(1, terms + 1, dtype=np.float64))
    log_sum = np.sum(np.log(SPAN / (2.0 + 4.0 * np.cos(theta))))
    tail = math.log(2.0) ** 2 / (3.0 * math.log(M + terms))
    return float(math.exp(log_sum + tail))


@dataclass(frozen=True)
class ScaleConstant:
    value: float
    limit: float


def scale_constant(
    schedule: AngleSchedule, ell: int, m: int, n: Optional[int] = None
) -> ScaleConstant:
    """
    :math:`L_{\\ell,m} = 6^{m-\\ell+1} / \\prod_{j=\\ell}^{m} (2 + 4\\cos\\theta_j)`, together with
    the limit over all levels (or the full product of the schedule if it was given explicitly).
    """
    n = len(schedule) if n is None else n
    if not 1 <= ell <= m <= n:
        raise ConfigurationError(f"need 1 <= ell <= m <= n, got ell={ell}, m={m}, n={n}")
    if n > len(schedule):
        raise ConfigurationError(f"level {n} needs {n} angles, the schedule has {len(schedule)}")
    factors = SPAN / schedule.spans
    value = float(np.prod(factors[ell - 1 : m]))
    if schedule.M is not None:
        limit = limit_scale_constant(schedule.M)
    else:
        limit = float(np.prod(factors))
    return ScaleConstant(value=value, limit=limit)


def hull_aperture(theta: float) -> float:
    """
    Half-angle at a terminal of the convex hull of a diamond motif laid out with angle ``theta``.
    """
    return theta / 2.0


@dataclass
class EmbeddedMap:
    graph: LaaksoGraph
    schedule: AngleSchedule
    planar: np.ndarray
    """Planar images as complex numbers."""
    vertical: np.ndarray
    _points: Optional[HPoint] = field(default=None, repr=False)

    @property
    def radius(self) -> float:
        """Planar source-sink span."""
        return float(abs(self.planar[self.graph.sink] - self.planar[self.graph.source]))

    @property
    def planar_xy(self) -> np.ndarray:
        return np.stack([self.planar.real, self.planar.imag], axis=-1)

    def points(self) -> HPoint:
        if self._points is None:
            self._points = HPoint(self.planar[:, None], self.vertical)
        return self._points

    def image(self, vertices) -> HPoint:
        ids = self.graph.ids(vertices)
        return HPoint(self.planar[ids][..., None], self.vertical[ids])

    def distance(self, u, v) -> np.ndarray:
        """Koranyi distance between the images of ``u`` and ``v``, broadcasting."""
        u = self.graph.ids(u)
        v = self.graph.ids(v)
        dx = self.planar[v] - self.planar[u]
        dc = self.vertical[v] - self.vertical[u] - 0.5 * np.imag(
            np.conj(self.planar[u]) * self.planar[v]
        )
        return np.sqrt(np.hypot(np.abs(dx) ** 2, dc))


def _layout(g: LaaksoGraph, schedule: AngleSchedule) -> np.ndarray:
    spans = schedule.spans[: g.level]
    planar = np.zeros(g.n_vertices, dtype=np.complex128)
    planar[g.sink] = float(np.prod(spans))
    for step in range(1, g.level + 1):
        local = g.motif.local_layout(schedule.theta(step))
        parents = g.edges_by_level[step - 1]
        start = planar[parents[:, 0]][:, None]
        axis = planar[parents[:, 1]][:, None] - start
        planar[g.new_vertex_ids(step)] = start + axis * (local[1:-1] / local[-1].real)[None, :]
    return planar


def _lift(g: LaaksoGraph, planar: np.ndarray) -> np.ndarray:
    edges = g.edges
    heads, first = np.unique(edges[:, 1], return_index=True)
    parent = np.full(g.n_vertices, g.source, dtype=np.int64)
    parent[heads] = edges[first, 0]
    swept = 0.5 * symplectic(planar[parent][:, None], planar[:, None])
    swept[g.source] = 0.0
    # Pointer doubling: after the loop swept[v] sums the tree edges from the source to v.
    pointer = parent
    while np.any(pointer != g.source):
        swept = swept + swept[pointer]
        pointer = pointer[pointer]
    return swept


def embed(g: LaaksoGraph, schedule: AngleSchedule) -> EmbeddedMap:
    if len(schedule) < g.level:
        raise ConfigurationError(
            f"embedding G_{g.level} needs {g.level} angles, the schedule has {len(schedule)}"
        )
    if not g.motif.embeddable:
        raise ConfigurationError(
            f"motif '{g.motif.name}' has no horizontal layout; it cannot be embedded"
        )
    planar = _layout(g, schedule)
    vertical = _lift(g, planar)
    logger.debug("embedded G_%d with span %.6g", g.level, abs(planar[g.sink]))
    return EmbeddedMap(g, schedule, planar, vertical)


def _as_complex(points) -> np.ndarray:
    arr = np.asarray(points)
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128)
    arr = arr.astype(np.float64)
    if arr.ndim < 2 or arr.shape[-1] != 2:
        raise ConfigurationError(
            f"expected complex points or real points of shape (..., 2), got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def signed_area(points, closed_by_chord: bool = True) -> np.ndarray:
    """
    Shoelace signed area of a polyline, positive for counterclockwise orientation. With
    ``closed_by_chord`` the last point is joined back to the first; without it the result is the
    area swept by the ray from the origin. ``points`` are complex of shape ``(..., L)`` or real
    of shape ``(..., L, 2)``.
    """
    z = _as_complex(points)
    if z.shape[-1] < 2:
        raise DegenerateConfigurationError(
            f"a polyline needs at least 2 points, got {z.shape[-1]}"
        )
    area = 0.5 * np.sum(np.imag(np.conj(z[..., :-1]) * z[..., 1:]), axis=-1)
    if closed_by_chord:
        area = area + 0.5 * np.imag(np.conj(z[..., -1]) * z[..., 0])
    return area


def segment_angle(f: EmbeddedMap, u, v) -> np.ndarray:
    """Absolute angle between the planar segment from ``u`` to ``v`` and the source-sink axis."""
    u = f.graph.ids(u)
    v = f.graph.ids(v)
    chord = f.planar[v] - f.planar[u]
    if np.any(chord == 0):
        raise DegenerateConfigurationError("segment endpoints have the same planar image")
    axis = f.planar[f.graph.sink] - f.planar[f.graph.source]
    return np.abs(np.angle(chord / axis))


def vertex_table(f: EmbeddedMap) -> Table:
    rows = [
        [v, float(z.real), float(z.imag), float(c)]
        for v, (z, c) in enumerate(zip(f.planar.tolist(), f.vertical.tolist()))
    ]
    return Table(["vertex_id", "planar_x", "planar_y", "vertical"], rows)


@dataclass
class EmbeddingCheck:
    name: str
    passed: bool
    checked: int
    worst: float
    tolerance: float
    witness: Optional[Tuple[int, ...]] = None
    details: Dict[str, float] = field(default_factory=dict)


def _worst(name: str, excess: np.ndarray, tolerance: float, witnesses: np.ndarray, **details):
    if excess.size == 0:
        return EmbeddingCheck(name, True, 0, -math.inf, tolerance, details=details)
    i = int(np.argmax(excess))
    return EmbeddingCheck(
        name=name,
        passed=bool(excess[i] <= tolerance),
        checked=int(excess.size),
        worst=float(excess[i]),
        tolerance=tolerance,
        witness=tuple(int(w) for w in np.atleast_1d(witnesses[i])),
        details=details,
    )


def check_edges(f: EmbeddedMap) -> EmbeddingCheck:
    """
    Every edge image is a unit segment with zero central residual. ``worst`` is the largest
    deviation of an edge length from 1.
    """
    scale = max(1.0, f.radius)
    u, v = f.graph.edges[:, 0], f.graph.edges[:, 1]
    residual = np.abs(
        f.vertical[v] - f.vertical[u] - 0.5 * np.imag(np.conj(f.planar[u]) * f.planar[v])
    )
    length_error = np.abs(f.distance(u, v) - 1.0)
    residual_tolerance = 1e-12 * scale**2
    check = _worst("edges", length_error, 1e-12 * scale, f.graph.edges)
    check.details = {
        "max_residual": float(residual.max()),
        "residual_tolerance": residual_tolerance,
    }
    check.passed = check.passed and bool(residual.max() <= residual_tolerance)
    return check


def check_terminal_distances(f: EmbeddedMap, rtol: float = 1e-9) -> EmbeddingCheck:
    """
    For every unscaled copy of every :math:`G_k`, the images of its terminals are exactly
    :math:`6^k / L_{n-k+1,n}` apart.
    """
    n = f.graph.level
    spans = f.schedule.spans[:n]
    errors = []
    witnesses = []
    for k in range(n + 1):
        terminals = copy_terminals(f.graph, k)
        expected = float(np.prod(spans[n - k :]))
        measured = f.distance(terminals[:, 0], terminals[:, 1])
        errors.append(np.abs(measured - expected) / expected)
        witnesses.append(terminals)
    return _worst("terminal-distances", np.concatenate(errors), rtol, np.concatenate(witnesses))


def check_zero_area(f: EmbeddedMap, count: int = 1000, seed: int = 1) -> EmbeddingCheck:
    """Sampled source-sink geodesics close up with zero signed area."""
    rng = spawn_generators(seed, 1)[0]
    walks = sample_geodesics(f.graph, count, rng)
    area = np.abs(signed_area(f.planar[walks], closed_by_chord=True))
    tolerance = 1e-9 * float(SPAN) ** (2 * f.graph.level)
    return _worst("zero-area", area, tolerance, walks[:, [0, -1]])


def check_convex_hull(f: EmbeddedMap) -> EmbeddingCheck:
    """All planar images lie in the convex hull of the images of the top-level motif."""
    if f.graph.level == 0:
        raise ConfigurationError("G_0 has no top-level motif")
    top = np.flatnonzero(f.graph.depth == 0)
    try:
        hull = ConvexHull(f.planar_xy[top])
    except QhullError:
        raise DegenerateConfigurationError("the top-level motif images are collinear")
    # equations are (normal, offset) with normal . x + offset <= 0 inside
    excess = (f.planar_xy @ hull.equations[:, :2].T + hull.equations[:, 2]).max(axis=1)
    return _worst("convex-hull", excess, 1e-9 * f.radius, np.arange(f.graph.n_vertices))


def check_planar_fork_collapse(f: EmbeddedMap) -> EmbeddingCheck:
    """
    For each top-level fork point ``z`` and each parallel pair ``x, y`` in different top-level
    copies with ``d(z, x) = d(z, y)``, the planar images satisfy
    ``|x~ - y~| <= 12 theta_1 d(z, x)``. ``worst`` is the largest excess over that bound.
    """
    g = f.graph
    if g.level == 0:
        raise ConfigurationError("G_0 has no fork points")
    theta_1 = f.schedule.theta(1)
    masks = copy_membership(g)
    excess_parts: List[np.ndarray] = []
    witness_parts: List[np.ndarray] = []
    for z in fork_points(g):
        from_z = distances_from(g, z)
        order = np.argsort(from_z, kind="stable")
        values, starts = np.unique(from_z[order], return_index=True)
        bounds = np.r_[starts, len(order)]
        for d, lo, hi in zip(values, bounds[:-1], bounds[1:]):
            if d == 0 or hi - lo < 2:
                continue
            group = order[lo:hi]
            i, j = np.triu_indices(len(group), k=1)
            x, y = group[i], group[j]
            keep = ((masks[x] & masks[y]) == 0) & ~is_series(g, x, y)
            if not np.any(keep):
                continue
            x, y = x[keep], y[keep]
            gap = np.abs(f.planar[x] - f.planar[y])
            excess_parts.append(gap - 12.0 * theta_1 * d)
            witness_parts.append(np.stack([np.full(len(x), z), x, y], axis=-1))
    if not excess_parts:
        return EmbeddingCheck("planar-fork-collapse", True, 0, -math.inf, 1e-9 * f.radius)
    return _worst(
        "planar-fork-collapse",
        np.concatenate(excess_parts),
        1e-9 * f.radius,
        np.concatenate(witness_parts),
    )


def _pairs_excess(f: EmbeddedMap, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return f.distance(rows, cols) - graph_distance(f.graph, rows, cols)


def check_lipschitz(
    f: EmbeddedMap, exhaustive_limit: int = 10**6, count: int = 10**5, seed: int = 1
) -> EmbeddingCheck:
    """
    ``d(f(x), f(y)) <= d_G(x, y)``, over all pairs when there are at most ``exhaustive_limit``
    of them and over ``count`` random pairs otherwise.
    """
    n_vertices = f.graph.n_vertices
    tolerance = 1e-9 * max(1.0, f.radius)
    if n_vertices * n_vertices <= exhaustive_limit:
        block = max(1, exhaustive_limit // max(n_vertices, 1) // 4)
        best = -math.inf
        witness: Optional[Tuple[int, int]] = None
        cols = np.arange(n_vertices)
        for lo, hi in chunk_bounds(n_vertices, block):
            rows = np.arange(lo, hi)
            excess = _pairs_excess(f, rows[:, None], cols[None, :])
            i = int(np.argmax(excess))
            if excess.flat[i] > best:
                best = float(excess.flat[i])
                r, c = np.unravel_index(i, excess.shape)
                witness = (int(rows[r]), int(cols[c]))
        return EmbeddingCheck(
            "lipschitz", best <= tolerance, n_vertices * n_vertices, best, tolerance, witness
        )
    rng = spawn_generators(seed, 1)[0]
    rows = rng.integers(0, n_vertices, size=count)
    cols = rng.integers(0, n_vertices, size=count)
    return _worst(
        "lipschitz", _pairs_excess(f, rows, cols), tolerance, np.stack([rows, cols], axis=-1)
    )


def check_developed_angles(f: EmbeddedMap, count: int = 1000, seed: int = 1) -> EmbeddingCheck:
    """
    Along developed paths from top-level motif vertices, the ``i``-th segment makes an angle of
    at most :math:`\\sum_{j \\leq \\lambda_i} \\theta_j` with the axis, where :math:`\\lambda_i` is
    the number of distinct scales among the first ``i`` segments.
    """
    g = f.graph
    if g.level == 0:
        raise ConfigurationError("G_0 has no developed paths")
    rng = spawn_generators(seed, 1)[0]
    top = np.flatnonzero(g.depth == 0)
    levels = g.levels
    cumulative = np.r_[0.0, np.cumsum(f.schedule.thetas[: g.level])]
    excess_parts = []
    witness_parts = []
    everyone = np.arange(g.n_vertices)
    for _ in range(count):
        x = int(rng.choice(top))
        after = everyone[(levels > levels[x]) & is_series(g, x, everyone)]
        if len(after) == 0:
            continue
        y = int(rng.choice(after))
        path = developed_path(g, x, y)
        points = np.asarray(path.points)
        angles = segment_angle(f, points[:-1], points[1:])
        bound = cumulative[np.minimum(path.lam_prefix(), g.level)]
        excess_parts.append(angles - bound)
        witness_parts.append(np.stack([points[:-1], points[1:]], axis=-1))
    if not excess_parts:
        return EmbeddingCheck("developed-angles", True, 0, -math.inf, 1e-9)
    return _worst(
        "developed-angles",
        np.concatenate(excess_parts),
        1e-9,
        np.concatenate(witness_parts),
    )


def run_checks(f: EmbeddedMap, samples: int = 1000, seed: int = 1) -> List[EmbeddingCheck]:
    """Every embedding check that applies at the graph's level."""
    checks = [
        check_edges(f),
        check_terminal_distances(f),
        check_zero_area(f, count=samples, seed=seed),
        check_lipschitz(f, count=samples, seed=seed),
    ]
    if f.graph.level >= 1:
        checks += [
            check_convex_hull(f),
            check_planar_fork_collapse(f),
            check_developed_angles(f, count=min(samples, 1000), seed=seed),
        ]
    return checks
