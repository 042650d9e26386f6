"""
Laakso graphs.

:math:`G_0` is a single edge. :math:`G_n` replaces every edge of :math:`G_{n-1}` by a copy of the
motif :math:`G_1`, a ten-edge graph of diameter 6 with a segment, a diamond-shaped cycle of two
four-edge branches, and another segment. Every edge has length 1, so :math:`G_n` has
:math:`10^n` edges and diameter :math:`6^n`.

Vertices carry flat integer ids. The source is ``0`` and the sink is ``1``; the vertices created
when the edges of :math:`G_{k-1}` are replaced come next, in edge order. Edges created at step
``k`` are numbered ``10 * P + j`` where ``P`` is the replaced edge and ``j`` the motif edge, so the
decimal digits of an edge number spell out the copies it sits in. Every non-terminal vertex is a
motif vertex of exactly one copy; its "home" is the number of that copy's edge and its "depth" is
the number of digits in it.

Distances are exact and computed from that hierarchy: a pair of vertices only interacts through
the smallest copy that contains both of them, and through the terminals of the sub-copies they
sit in.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .common.aliases import IndexArray
from .common.exceptions import (
    CapExceededError,
    ConfigurationError,
    InvalidAddressError,
)
from .common.registrable import Registrable
from .format import Table

logger = logging.getLogger(__name__)

BRANCHING = 10
"""Number of edges of the motif, and of sub-copies in every copy."""

SPAN = 6
"""Length of a source-sink geodesic of the motif."""

DEFAULT_LEVEL_CAP = 6

DEFAULT_MATRIX_CAP = 10**8


class Motif(Registrable):
    """
    The graph :math:`G_1` that replaces every edge. Vertex ``0`` is the source and vertex
    ``n_vertices - 1`` the sink; edges are oriented from source to sink.
    """

    default_implementation = "laakso"

    labels: Tuple[str, ...] = ()
    edges: Tuple[Tuple[int, int], ...] = ()
    embeddable: bool = True

    def __init__(self):
        if len(self.edges) != BRANCHING:
            raise ConfigurationError(
                f"motif {type(self).__name__} has {len(self.edges)} edges, expected {BRANCHING}"
            )
        self.n_vertices = len(self.labels)
        edge_array = np.asarray(self.edges, dtype=np.int64)
        self.edge_array = edge_array
        adjacency = csr_matrix(
            (np.ones(len(edge_array)), (edge_array[:, 0], edge_array[:, 1])),
            shape=(self.n_vertices, self.n_vertices),
        )
        self.distances = shortest_path(adjacency, directed=False, unweighted=True).astype(
            np.int64
        )
        if self.distances[0, -1] != SPAN:
            raise ConfigurationError(f"motif {type(self).__name__} must have diameter {SPAN}")
        self.degrees = np.bincount(edge_array.ravel(), minlength=self.n_vertices)
        self.fork_indices = np.flatnonzero(self.degrees == 3)
        masks = np.zeros(self.n_vertices, dtype=np.int64)
        for j, (a, b) in enumerate(self.edges):
            masks[a] |= 1 << j
            masks[b] |= 1 << j
        self.incidence_masks = masks

    @property
    def name(self) -> str:
        return next(k for k in Motif.list_available() if Motif.by_name(k) is type(self))

    def local_layout(self, theta: float) -> np.ndarray:
        """
        Planar positions of the motif vertices, as complex numbers, when every edge has
        length 1 and the diamond edges make angle ``theta`` with the axis. The source is at
        ``0`` and the sink at ``2 + 4 cos(theta)``.
        """
        raise ConfigurationError(
            f"motif '{self.name}' has no horizontal layout; it cannot be embedded"
        )


@Motif.register("laakso")
class LaaksoMotif(Motif):
    """
    Segment, an eight-cycle whose two source-to-sink branches have four edges each, segment.
    The midpoints of the two branches are distinct vertices that share a planar image.
    """

    labels = ("s", "a", "p1", "p2", "p3", "q1", "q2", "q3", "b", "t")
    edges = (
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 8),
        (1, 5),
        (5, 6),
        (6, 7),
        (7, 8),
        (8, 9),
    )

    def local_layout(self, theta: float) -> np.ndarray:
        up = np.exp(1j * theta)
        down = np.conj(up)
        p1 = 1.0 + up
        p2 = p1 + down
        p3 = p2 + down
        b = p3 + up
        return np.array(
            [0.0, 1.0, p1, p2, p3, np.conj(p1), np.conj(p2), np.conj(p3), b, b + 1.0],
            dtype=np.complex128,
        )


@Motif.register("planar-double-diamond")
class PlanarDoubleDiamondMotif(Motif):
    """
    Segment, two four-cycles in series sharing a midpoint, segment. Graph operations work on it;
    it has no horizontal embedding because a four-cycle cannot close with zero signed area.
    """

    labels = ("s", "a", "top1", "bot1", "m", "top2", "bot2", "b", "t")
    edges = (
        (0, 1),
        (1, 2),
        (2, 4),
        (1, 3),
        (3, 4),
        (4, 5),
        (5, 7),
        (4, 6),
        (6, 7),
        (7, 8),
    )
    embeddable = False


class PairOrder(str, Enum):
    SERIES = "series"
    PARALLEL = "parallel"


@dataclass(frozen=True)
class VertexAddress:
    """
    Locates a vertex through the substitution hierarchy: ``path`` lists the motif edge taken at
    each refinement level, ``motif_index`` is the vertex inside the copy the path ends at.
    The terminals of a copy resolve to the vertex they coincide with.
    """

    path: Tuple[int, ...]
    motif_index: int

    def __str__(self) -> str:
        return "/".join(str(d) for d in self.path) + f":{self.motif_index}"


@dataclass
class LaaksoGraph:
    level: int
    motif: Motif
    edges_by_level: List[np.ndarray]
    """``edges_by_level[k]`` holds the oriented edges of :math:`G_k` with shape ``(10**k, 2)``."""
    depth: np.ndarray
    home: np.ndarray
    motif_index: np.ndarray
    _offsets: np.ndarray = field(repr=False)
    """Distances from each vertex to the source and sink of every copy on its home path."""
    _cache: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    source: int = 0
    sink: int = 1

    @property
    def n_vertices(self) -> int:
        return len(self.depth)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def edges(self) -> np.ndarray:
        return self.edges_by_level[self.level]

    @property
    def diameter(self) -> int:
        return SPAN**self.level

    @property
    def levels(self) -> np.ndarray:
        """Distance of every vertex from the source. ``G_n`` is graded by it."""
        if self.level == 0:
            return np.array([0, 1], dtype=np.int64)
        return self._offsets[:, 0, 0]

    def scale(self, copy_depth: Union[int, np.ndarray]) -> Union[int, np.ndarray]:
        """Length of the motif edges of a copy at the given depth."""
        return SPAN ** (self.level - 1 - np.asarray(copy_depth, dtype=np.int64))

    def vertex_base(self, step: int) -> int:
        """Id of the first vertex created at substitution step ``step``."""
        inner = self.motif.n_vertices - 2
        return 2 + inner * (BRANCHING ** (step - 1) - 1) // (BRANCHING - 1)

    def new_vertex_ids(self, step: int) -> np.ndarray:
        """
        Ids of the vertices created at step ``step``, shape ``(10**(step - 1), n_motif - 2)``,
        indexed by replaced edge and motif index minus one.
        """
        inner = self.motif.n_vertices - 2
        count = BRANCHING ** (step - 1)
        return self.vertex_base(step) + np.arange(count * inner).reshape(count, inner)

    def ids(self, vertices) -> np.ndarray:
        """Resolves ids, arrays of ids, or :class:`VertexAddress` objects to an id array."""
        if isinstance(vertices, VertexAddress):
            return np.asarray(vertex_id(self, vertices))
        if (
            isinstance(vertices, (list, tuple))
            and vertices
            and isinstance(vertices[0], VertexAddress)
        ):
            return np.asarray([vertex_id(self, a) for a in vertices])
        out = np.asarray(vertices)
        if out.dtype.kind not in "iu":
            if out.size == 0:
                return out.astype(np.int64)
            raise InvalidAddressError(f"vertex ids must be integers, got dtype {out.dtype}")
        if out.size and (out.min() < 0 or out.max() >= self.n_vertices):
            bad = out[(out < 0) | (out >= self.n_vertices)].ravel()[0]
            raise InvalidAddressError(
                f"vertex id {bad} is not in G_{self.level} ({self.n_vertices} vertices)"
            )
        return out.astype(np.int64)

    def digit(self, vertices: np.ndarray, position: np.ndarray) -> np.ndarray:
        """The motif edge taken at refinement level ``position`` on the home path."""
        power = np.maximum(self.depth[vertices] - 1 - position, 0)
        return (self.home[vertices] // BRANCHING**power) % BRANCHING

    def adjacency(self) -> csr_matrix:
        if "adjacency" not in self._cache:
            e = self.edges
            n = self.n_vertices
            self._cache["adjacency"] = csr_matrix(
                (np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                shape=(n, n),
            )
        return self._cache["adjacency"]

    def out_table(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Out-neighbors along the source-to-sink orientation as a table padded with ``-1``,
        together with the out-degrees.
        """
        if "out_table" not in self._cache:
            e = self.edges
            order = np.argsort(e[:, 0], kind="stable")
            heads = e[order]
            counts = np.bincount(heads[:, 0], minlength=self.n_vertices)
            width = max(int(counts.max()), 1)
            starts = np.r_[0, np.cumsum(counts)[:-1]]
            slot = np.arange(len(heads)) - starts[heads[:, 0]]
            table = np.full((self.n_vertices, width), -1, dtype=np.int64)
            table[heads[:, 0], slot] = heads[:, 1]
            self._cache["out_table"] = table
            self._cache["out_degree"] = counts
        return self._cache["out_table"], self._cache["out_degree"]


def _terminal_offsets(
    level: int,
    motif: Motif,
    depth: np.ndarray,
    home: np.ndarray,
    motif_index: np.ndarray,
) -> np.ndarray:
    n_vertices = len(depth)
    offsets = np.zeros((n_vertices, max(level, 1), 2), dtype=np.int64)
    if level == 0:
        offsets[1, 0] = (1, 0)
        offsets[0, 0] = (0, 1)
        return offsets

    d1 = motif.distances
    sink = motif.n_vertices - 1
    everyone = np.arange(n_vertices)
    scale = SPAN ** (level - 1 - depth)
    offsets[everyone, depth, 0] = scale * d1[motif_index, 0]
    offsets[everyone, depth, 1] = scale * d1[motif_index, sink]

    heads, tails = motif.edge_array[:, 0], motif.edge_array[:, 1]
    for e in range(level - 1, 0, -1):
        inside = np.flatnonzero(depth >= e)
        if len(inside) == 0:
            continue
        power = depth[inside] - e
        j = (home[inside] // BRANCHING**power) % BRANCHING
        a, b = heads[j], tails[j]
        up = SPAN ** (level - e)
        to_s, to_t = offsets[inside, e, 0], offsets[inside, e, 1]
        offsets[inside, e - 1, 0] = np.minimum(to_s + up * d1[a, 0], to_t + up * d1[b, 0])
        offsets[inside, e - 1, 1] = np.minimum(to_s + up * d1[a, sink], to_t + up * d1[b, sink])
    return offsets


def build_graph(
    n: int, motif: str = "laakso", level_cap: int = DEFAULT_LEVEL_CAP
) -> LaaksoGraph:
    """
    Builds :math:`G_n` by ``n`` rounds of edge substitution.
    """
    if n < 0:
        raise ConfigurationError(f"level must be nonnegative, got {n}")
    if n > level_cap:
        raise CapExceededError(f"level {n} is above the level cap of {level_cap}")
    shape = Motif.by_name(motif)()
    inner = shape.n_vertices - 2

    edges = np.array([[0, 1]], dtype=np.int64)
    edges_by_level = [edges]
    depth_parts = [np.zeros(2, dtype=np.int64)]
    home_parts = [np.zeros(2, dtype=np.int64)]
    index_parts = [np.array([0, shape.n_vertices - 1], dtype=np.int64)]
    n_vertices = 2
    for step in range(1, n + 1):
        parents = edges_by_level[-1]
        count = len(parents)
        local = np.empty((count, shape.n_vertices), dtype=np.int64)
        local[:, 0] = parents[:, 0]
        local[:, -1] = parents[:, 1]
        local[:, 1:-1] = n_vertices + np.arange(count * inner).reshape(count, inner)
        edges_by_level.append(local[:, shape.edge_array].reshape(count * BRANCHING, 2))
        depth_parts.append(np.full(count * inner, step - 1, dtype=np.int64))
        home_parts.append(np.repeat(np.arange(count, dtype=np.int64), inner))
        index_parts.append(np.tile(np.arange(1, shape.n_vertices - 1, dtype=np.int64), count))
        n_vertices += count * inner
        logger.debug("G_%d: %d vertices, %d edges", step, n_vertices, len(edges_by_level[-1]))

    depth = np.concatenate(depth_parts)
    home = np.concatenate(home_parts)
    motif_index = np.concatenate(index_parts)
    offsets = _terminal_offsets(n, shape, depth, home, motif_index)
    return LaaksoGraph(
        level=n,
        motif=shape,
        edges_by_level=edges_by_level,
        depth=depth,
        home=home,
        motif_index=motif_index,
        _offsets=offsets,
    )


def vertex_id(g: LaaksoGraph, address: VertexAddress) -> int:
    path = tuple(address.path)
    m = address.motif_index
    last = g.motif.n_vertices - 1
    if not 0 <= m <= last:
        raise InvalidAddressError(f"motif index {m} out of range in address {address}")
    if any(not 0 <= d < BRANCHING for d in path):
        raise InvalidAddressError(f"address {address} has a digit outside 0..{BRANCHING - 1}")
    if g.level == 0:
        if path or m not in (0, last):
            raise InvalidAddressError(f"address {address} does not exist in G_0")
        return g.source if m == 0 else g.sink
    if len(path) > g.level - 1:
        raise InvalidAddressError(f"address {address} is deeper than G_{g.level} allows")
    copy = 0
    for d in path:
        copy = copy * BRANCHING + d
    if m == 0 or m == last:
        return int(g.edges_by_level[len(path)][copy, 0 if m == 0 else 1])
    return int(g.vertex_base(len(path) + 1) + copy * (g.motif.n_vertices - 2) + m - 1)


def vertex_address(g: LaaksoGraph, v: int) -> VertexAddress:
    v = int(g.ids(v))
    d = int(g.depth[v])
    digits = [int(c) for c in str(int(g.home[v])).zfill(d)] if d else []
    return VertexAddress(tuple(digits), int(g.motif_index[v]))


def _common_depth(g: LaaksoGraph, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    du, dv = g.depth[u], g.depth[v]
    hu, hv = g.home[u], g.home[v]
    common = np.zeros(np.broadcast(u, v).shape, dtype=np.int64)
    for e in range(1, g.level):
        valid = (du >= e) & (dv >= e)
        pu = hu // BRANCHING ** np.maximum(du - e, 0)
        pv = hv // BRANCHING ** np.maximum(dv - e, 0)
        common = np.where(valid & (pu == pv), e, common)
    return common


def _exits(g: LaaksoGraph, w: np.ndarray, c: np.ndarray) -> Tuple[np.ndarray, ...]:
    """
    The two motif vertices of the depth-``c`` copy through which ``w`` is reached, with the
    distance from ``w`` to each.
    """
    own = g.depth[w] == c
    inner = np.minimum(c + 1, g.level - 1)
    j = g.digit(w, c)
    heads, tails = g.motif.edge_array[j, 0], g.motif.edge_array[j, 1]
    x0 = np.where(own, g.motif_index[w], heads)
    x1 = np.where(own, g.motif_index[w], tails)
    o0 = np.where(own, 0, g._offsets[w, inner, 0])
    o1 = np.where(own, 0, g._offsets[w, inner, 1])
    return x0, o0, x1, o1


def graph_distance(g: LaaksoGraph, u, v) -> np.ndarray:
    """
    Exact shortest-path distance between vertices ``u`` and ``v`` (ids, id arrays or
    addresses), broadcasting over arrays.
    """
    u = g.ids(u)
    v = g.ids(v)
    if g.level == 0:
        return (u != v).astype(np.int64)
    u, v = np.broadcast_arrays(u, v)
    c = _common_depth(g, u, v)
    ux0, uo0, ux1, uo1 = _exits(g, u, c)
    vx0, vo0, vx1, vo1 = _exits(g, v, c)
    d1 = g.motif.distances
    scale = g.scale(c)
    best = uo0 + scale * d1[ux0, vx0] + vo0
    best = np.minimum(best, uo0 + scale * d1[ux0, vx1] + vo1)
    best = np.minimum(best, uo1 + scale * d1[ux1, vx0] + vo0)
    best = np.minimum(best, uo1 + scale * d1[ux1, vx1] + vo1)
    return np.where(u == v, 0, best)


def distances_from(g: LaaksoGraph, v) -> np.ndarray:
    return graph_distance(g, g.ids(v), np.arange(g.n_vertices))


def distance_matrix(g: LaaksoGraph, cap: int = DEFAULT_MATRIX_CAP) -> np.ndarray:
    n = g.n_vertices
    if n * n > cap:
        raise CapExceededError(
            f"a {n} x {n} distance matrix is above the matrix cap of {cap} entries"
        )
    everyone = np.arange(n)
    return graph_distance(g, everyone[:, None], everyone[None, :])


def bfs_distances(g: LaaksoGraph, source) -> np.ndarray:
    """Breadth-first distances from ``source``; an oracle for :func:`graph_distance`."""
    result = shortest_path(g.adjacency(), directed=False, unweighted=True, indices=g.ids(source))
    return result.astype(np.int64)


def is_series(g: LaaksoGraph, u, v) -> np.ndarray:
    """
    Whether some source-sink geodesic passes through both vertices. Because ``G_n`` is
    graded, that happens exactly when their distance equals their level difference.
    """
    u = g.ids(u)
    v = g.ids(v)
    return graph_distance(g, u, v) == np.abs(g.levels[u] - g.levels[v])


def classify_pair(g: LaaksoGraph, u, v) -> Union[PairOrder, np.ndarray]:
    series = is_series(g, u, v)
    if series.ndim == 0:
        return PairOrder.SERIES if series else PairOrder.PARALLEL
    return np.where(series, PairOrder.SERIES.value, PairOrder.PARALLEL.value)


def fork_points(g: LaaksoGraph, level: Optional[int] = None, all_levels: bool = False):
    """
    The degree-3 branch and merge vertices. By default those of the top-level motif; with
    ``level=k`` those of every unscaled copy of :math:`G_k`; with ``all_levels`` every fork.
    """
    if g.level == 0:
        raise ConfigurationError("G_0 is a single edge and has no fork points")
    forks = np.isin(g.motif_index, g.motif.fork_indices)
    if all_levels:
        return np.flatnonzero(forks)
    k = g.level if level is None else level
    if not 1 <= k <= g.level:
        raise ConfigurationError(f"fork level must be in 1..{g.level}, got {k}")
    return np.flatnonzero(forks & (g.depth == g.level - k))


@dataclass
class Copy:
    source: int
    sink: int
    vertices: np.ndarray


def copy_terminals(g: LaaksoGraph, k: int) -> np.ndarray:
    """Source and sink of every unscaled copy of :math:`G_k`, shape ``(10**(n - k), 2)``."""
    if not 0 <= k <= g.level:
        raise ConfigurationError(f"copy level must be in 0..{g.level}, got {k}")
    return g.edges_by_level[g.level - k]


def enumerate_copies(g: LaaksoGraph, k: int) -> List[Copy]:
    terminals = copy_terminals(g, k)
    blocks = g.edges.reshape(len(terminals), -1)
    return [
        Copy(int(s), int(t), np.unique(block))
        for (s, t), block in zip(terminals, blocks)
    ]


def copy_membership(g: LaaksoGraph) -> np.ndarray:
    """
    For every vertex, a bit mask of the top-level copies of :math:`G_{n-1}` that contain it.
    Two vertices lie in different copies exactly when their masks are disjoint.
    """
    if g.level == 0:
        raise ConfigurationError("G_0 has no copies of G_-1")
    masks = np.left_shift(1, g.digit(np.arange(g.n_vertices), np.zeros(1, dtype=np.int64)))
    top = g.depth == 0
    masks[top] = g.motif.incidence_masks[g.motif_index[top]]
    return masks


@dataclass(frozen=True)
class DevelopedPath:
    points: Tuple[int, ...]
    scales: Tuple[int, ...]

    @property
    def lam(self) -> int:
        """The number of distinct scales."""
        return len(set(self.scales))

    def lam_prefix(self) -> np.ndarray:
        """Number of distinct scales among the first ``i + 1`` segments, for each ``i``."""
        seen: set = set()
        out = []
        for a in self.scales:
            seen.add(a)
            out.append(len(seen))
        return np.asarray(out, dtype=np.int64)

    @property
    def length(self) -> int:
        return int(sum(SPAN**a for a in self.scales))


def developed_path(g: LaaksoGraph, x, y) -> DevelopedPath:
    """
    Splits a geodesic from ``x`` to ``y`` greedily into segments of length ``6**a`` with ``a``
    as large as possible at every step. Among equally valid next points the one with the
    lexicographically smallest address wins.
    """
    x = int(g.ids(x))
    y = int(g.ids(y))
    to_y = distances_from(g, y)
    remaining = int(to_y[x])
    points = [x]
    scales: List[int] = []
    current = x
    while remaining > 0:
        a = 0
        while SPAN ** (a + 1) <= remaining:
            a += 1
        step = SPAN**a
        from_current = distances_from(g, current)
        candidates = np.flatnonzero((from_current == step) & (to_y == remaining - step))
        current = min(
            (int(w) for w in candidates),
            key=lambda w: (vertex_address(g, w).path, int(g.motif_index[w])),
        )
        points.append(current)
        scales.append(a)
        remaining -= step
    return DevelopedPath(tuple(points), tuple(scales))


def count_geodesics(g: LaaksoGraph) -> int:
    """Number of source-sink geodesics, counted exactly over the graded DAG."""
    levels = g.levels
    edges = g.edges[np.argsort(levels[g.edges[:, 0]], kind="stable")]
    counts = [0] * g.n_vertices
    counts[g.source] = 1
    for u, v in edges.tolist():
        counts[v] += counts[u]
    return counts[g.sink]


def sample_geodesics(g: LaaksoGraph, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    Random source-sink geodesics as vertex sequences of shape ``(count, 6**n + 1)``, drawn by
    walking forward and choosing uniformly among out-neighbors.
    """
    table, degree = g.out_table()
    walks = np.empty((count, g.diameter + 1), dtype=np.int64)
    walks[:, 0] = g.source
    for t in range(g.diameter):
        here = walks[:, t]
        choice = np.floor(rng.random(count) * degree[here]).astype(np.int64)
        walks[:, t + 1] = table[here, choice]
    return walks


def to_networkx(g: LaaksoGraph, directed: bool = False) -> Union[nx.Graph, nx.DiGraph]:
    graph = nx.DiGraph() if directed else nx.Graph()
    graph.add_nodes_from(range(g.n_vertices))
    graph.add_edges_from(g.edges.tolist())
    return graph


def degree(g: LaaksoGraph) -> np.ndarray:
    return np.bincount(g.edges.ravel(), minlength=g.n_vertices)


def out_neighbors(g: LaaksoGraph, v) -> np.ndarray:
    table, deg = g.out_table()
    v = int(g.ids(v))
    return table[v, : deg[v]].copy()


def level_of(g: LaaksoGraph, v) -> np.ndarray:
    return g.levels[g.ids(v)]


def stats(g: LaaksoGraph) -> Dict[str, Union[int, str]]:
    return {
        "level": g.level,
        "motif": g.motif.name,
        "vertices": g.n_vertices,
        "edges": g.n_edges,
        "diameter": g.diameter,
    }


def edge_table(g: LaaksoGraph) -> Table:
    return Table(["u_id", "v_id"], g.edges.tolist())


def vertex_table(g: LaaksoGraph) -> Table:
    rows: List[Sequence] = []
    for v in range(g.n_vertices):
        address = vertex_address(g, v)
        rows.append(
            [v, int(g.depth[v]), "".join(map(str, address.path)), address.motif_index]
        )
    return Table(["vertex_id", "depth", "path", "motif_index"], rows)


def resolve_vertices(g: LaaksoGraph, vertices: Sequence[Union[int, VertexAddress]]) -> np.ndarray:
    return np.asarray([int(g.ids(v)) for v in vertices], dtype=np.int64)
