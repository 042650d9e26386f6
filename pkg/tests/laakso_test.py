import networkx as nx
import numpy as np
import pytest

from heislab.common.exceptions import (
    CapExceededError,
    ConfigurationError,
    InvalidAddressError,
)
from heislab.common.testing import HeislabTestCase
from heislab.laakso import (
    PairOrder,
    VertexAddress,
    bfs_distances,
    build_graph,
    classify_pair,
    copy_membership,
    copy_terminals,
    count_geodesics,
    degree,
    developed_path,
    distance_matrix,
    edge_table,
    enumerate_copies,
    fork_points,
    graph_distance,
    is_series,
    level_of,
    out_neighbors,
    sample_geodesics,
    stats,
    to_networkx,
    vertex_address,
    vertex_id,
    vertex_table,
)


class TestBuildGraph(HeislabTestCase):
    @pytest.mark.parametrize(
        "motif, level, vertices",
        [
            ("laakso", 0, 2),
            ("laakso", 1, 10),
            ("laakso", 2, 90),
            ("laakso", 3, 890),
            ("planar-double-diamond", 1, 9),
            ("planar-double-diamond", 2, 79),
            ("planar-double-diamond", 3, 779),
        ],
    )
    def test_counts(self, motif: str, level: int, vertices: int):
        g = build_graph(level, motif=motif)
        assert g.n_vertices == vertices
        assert g.n_edges == 10**level
        assert g.diameter == 6**level
        assert stats(g) == {
            "level": level,
            "motif": motif,
            "vertices": vertices,
            "edges": 10**level,
            "diameter": 6**level,
        }

    def test_degrees(self):
        g = build_graph(2)
        assert int(degree(g).sum()) == 2 * g.n_edges
        assert degree(g)[g.source] == 1
        assert degree(g)[g.sink] == 1

    def test_level_cap(self):
        with pytest.raises(CapExceededError) as exc:
            build_graph(7)
        assert "6" in str(exc.value)
        assert build_graph(2, level_cap=2).level == 2

    def test_negative_level(self):
        with pytest.raises(ConfigurationError):
            build_graph(-1)

    def test_networkx_view(self):
        g = build_graph(2)
        graph = to_networkx(g)
        assert graph.number_of_nodes() == 90
        assert graph.number_of_edges() == 100
        assert nx.is_connected(graph)
        assert nx.shortest_path_length(graph, g.source, g.sink) == 36


class TestDistances(HeislabTestCase):
    @pytest.mark.parametrize("motif", ["laakso", "planar-double-diamond"])
    @pytest.mark.parametrize("level", [1, 2])
    def test_against_breadth_first_search(self, motif: str, level: int):
        g = build_graph(level, motif=motif)
        everyone = np.arange(g.n_vertices)
        expected = np.stack([bfs_distances(g, v) for v in everyone])
        np.testing.assert_array_equal(distance_matrix(g), expected)

    def test_sampled_pairs_at_level_three(self):
        g = build_graph(3)
        sources = self.rng.integers(0, g.n_vertices, size=20)
        for v in sources:
            np.testing.assert_array_equal(
                graph_distance(g, int(v), np.arange(g.n_vertices)), bfs_distances(g, int(v))
            )

    def test_terminals(self):
        for n in range(4):
            g = build_graph(n)
            assert int(graph_distance(g, g.source, g.sink)) == 6**n
            assert int(level_of(g, g.sink)) == 6**n

    def test_matrix_cap(self):
        with pytest.raises(CapExceededError):
            distance_matrix(build_graph(2), cap=100)

    def test_bad_ids(self):
        g = build_graph(1)
        with pytest.raises(InvalidAddressError):
            graph_distance(g, 0, 10)
        with pytest.raises(InvalidAddressError):
            graph_distance(g, -1, 0)


class TestGeodesics(HeislabTestCase):
    @pytest.mark.parametrize(
        "motif, level, expected",
        [("laakso", 1, 2), ("laakso", 2, 128), ("planar-double-diamond", 1, 4)],
    )
    def test_count(self, motif: str, level: int, expected: int):
        g = build_graph(level, motif=motif)
        assert count_geodesics(g) == expected

    def test_count_matches_networkx(self):
        g = build_graph(2, motif="planar-double-diamond")
        paths = nx.all_shortest_paths(to_networkx(g), g.source, g.sink)
        assert count_geodesics(g) == sum(1 for _ in paths)

    def test_sampled_walks_are_geodesics(self):
        g = build_graph(3)
        walks = sample_geodesics(g, 50, self.rng)
        assert walks.shape == (50, 217)
        assert np.all(walks[:, 0] == g.source)
        assert np.all(walks[:, -1] == g.sink)
        steps = graph_distance(g, walks[:, :-1], walks[:, 1:])
        assert np.all(steps == 1)
        np.testing.assert_array_equal(g.levels[walks], np.arange(217)[None, :].repeat(50, 0))

    def test_out_neighbors(self):
        g = build_graph(1)
        a = vertex_id(g, VertexAddress((), 1))
        assert sorted(out_neighbors(g, a).tolist()) == sorted(
            [vertex_id(g, VertexAddress((), 2)), vertex_id(g, VertexAddress((), 5))]
        )
        assert len(out_neighbors(g, g.sink)) == 0


class TestAddresses(HeislabTestCase):
    def test_every_vertex_resolves_to_itself(self):
        g = build_graph(3)
        for v in range(g.n_vertices):
            assert vertex_id(g, vertex_address(g, v)) == v

    def test_terminals_of_a_copy(self):
        g = build_graph(2)
        # Motif edge 0 of G_1 is the segment from the source.
        assert vertex_id(g, VertexAddress((0,), 0)) == g.source
        assert vertex_id(g, VertexAddress((9,), 9)) == g.sink

    @pytest.mark.parametrize(
        "address",
        [VertexAddress((), 10), VertexAddress((10,), 1), VertexAddress((0, 0), 1)],
    )
    def test_invalid(self, address: VertexAddress):
        with pytest.raises(InvalidAddressError):
            vertex_id(build_graph(2), address)

    def test_ids_accept_addresses(self):
        g = build_graph(2)
        a = VertexAddress((), 1)
        assert int(graph_distance(g, a, g.source)) == 6

    def test_vertex_table(self):
        g = build_graph(1)
        table = vertex_table(g)
        assert table.columns == ["vertex_id", "depth", "path", "motif_index"]
        assert len(table) == 10
        assert edge_table(g).columns == ["u_id", "v_id"]
        assert len(edge_table(g)) == 10


class TestStructure(HeislabTestCase):
    def test_fork_points(self):
        g = build_graph(1)
        forks = fork_points(g)
        assert sorted(int(g.motif_index[v]) for v in forks) == [1, 8]
        assert np.all(degree(g)[forks] == 3)

    def test_fork_points_per_level(self):
        g = build_graph(3)
        assert len(fork_points(g, level=3)) == 2
        assert len(fork_points(g, level=2)) == 2 * 10
        assert len(fork_points(g, level=1)) == 2 * 100
        assert len(fork_points(g, all_levels=True)) == 222
        with pytest.raises(ConfigurationError):
            fork_points(build_graph(0))

    def test_series_and_parallel(self):
        g = build_graph(1)
        p2 = vertex_id(g, VertexAddress((), 3))
        q2 = vertex_id(g, VertexAddress((), 6))
        assert classify_pair(g, g.source, g.sink) == PairOrder.SERIES
        assert classify_pair(g, p2, q2) == PairOrder.PARALLEL
        assert int(graph_distance(g, p2, q2)) == 4
        assert bool(is_series(g, g.source, p2))

    def test_copies(self):
        g = build_graph(2)
        assert copy_terminals(g, 2).tolist() == [[g.source, g.sink]]
        copies = enumerate_copies(g, 1)
        assert len(copies) == 10
        assert all(len(c.vertices) == 10 for c in copies)
        assert copies[0].source == g.source

    def test_copy_membership(self):
        g = build_graph(2)
        masks = copy_membership(g)
        copies = enumerate_copies(g, 1)
        for i, c in enumerate(copies):
            assert np.all(masks[c.vertices] & (1 << i))
        # The source only sits in the first copy.
        assert masks[g.source] == 1

    def test_developed_path(self):
        g = build_graph(2)
        whole = developed_path(g, g.source, g.sink)
        assert whole.scales == (2,)
        assert whole.lam == 1
        target = int(np.flatnonzero(g.levels == 7)[0])
        split = developed_path(g, g.source, target)
        assert split.scales == (1, 0)
        assert split.lam == 2
        assert split.length == 7
        assert split.lam_prefix().tolist() == [1, 2]
