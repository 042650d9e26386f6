import math

import numpy as np
import pytest
from scipy.sparse import csr_matrix

from heislab.common.exceptions import CapExceededError, ConfigurationError
from heislab.common.testing import HeislabTestCase
from heislab.distortion import GraphMetric, MatrixMetric
from heislab.laakso import build_graph
from heislab.markov import (
    ChainSpec,
    chain_metric,
    drift_windows,
    first_coalesced_k,
    fork_chain,
    functional,
    laakso_chain,
    restricted_drift_sum,
    sample_trajectories,
    sweep,
    window_height,
)


class TestChainSpec(HeislabTestCase):
    def test_constant(self):
        spec = ChainSpec.constant(3, t_max=4, state=1)
        assert spec.n_states == 3
        estimate = functional(spec, MatrixMetric(np.ones((3, 3)) - np.eye(3)), 2.0)
        assert estimate.lhs == 0.0
        assert estimate.rhs == 0.0
        assert estimate.ratio_pi == 0.0

    @pytest.mark.parametrize(
        "transition, initial, t_max",
        [
            ([[1.0, 0.0]], [1.0], 2),
            ([[0.5, 0.4], [0.0, 1.0]], [1.0, 0.0], 2),
            ([[1.5, -0.5], [0.0, 1.0]], [1.0, 0.0], 2),
            ([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.4], 2),
            ([[1.0, 0.0], [0.0, 1.0]], [1.0], 2),
            ([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0], 0),
        ],
    )
    def test_validation(self, transition, initial, t_max):
        with pytest.raises(ConfigurationError):
            ChainSpec(csr_matrix(np.array(transition)), np.array(initial), t_max)

    def test_laakso_chain(self):
        g = build_graph(2)
        spec = laakso_chain(g)
        assert spec.tag == "laakso"
        assert spec.t_max == 36
        assert spec.initial[g.source] == 1.0
        assert spec.transition[g.sink, g.sink] == 1.0
        with pytest.raises(ConfigurationError):
            laakso_chain(build_graph(0))


class TestTrajectories(HeislabTestCase):
    def test_walks_are_geodesics(self):
        g = build_graph(2)
        spec = laakso_chain(g)
        z = sample_trajectories(spec, 50, self.rng)
        assert z.shape == (50, 37)
        assert np.all(z[:, 0] == g.source)
        assert np.all(z[:, -1] == g.sink)
        np.testing.assert_array_equal(g.levels[z], np.broadcast_to(np.arange(37), z.shape))

    def test_seeded(self):
        spec = laakso_chain(build_graph(2))
        np.testing.assert_array_equal(
            sample_trajectories(spec, 10, 4), sample_trajectories(spec, 10, 4)
        )

    def test_fork_keeps_the_past(self):
        g = build_graph(2)
        spec = laakso_chain(g)
        z = sample_trajectories(spec, 20, self.rng)
        forked = fork_chain(spec, z, 10, self.rng)
        np.testing.assert_array_equal(forked[:, :11], z[:, :11])
        assert np.all(forked[:, -1] == g.sink)
        single = fork_chain(spec, z[0], 10, self.rng)
        assert single.shape == z[0].shape
        np.testing.assert_array_equal(fork_chain(spec, z, spec.t_max, self.rng), z)
        with pytest.raises(ConfigurationError):
            fork_chain(spec, z, -2, self.rng)


class TestFunctional(HeislabTestCase):
    def test_single_motif_exact(self):
        g = build_graph(1)
        estimate = functional(laakso_chain(g), GraphMetric(g), 2.0)
        assert estimate.mode == "exact"
        assert estimate.k_range == (0, 3)
        assert estimate.terms == pytest.approx([2.0, 2.5, 0.75])
        assert estimate.tail == pytest.approx(0.25)
        assert estimate.lhs == pytest.approx(5.5)
        assert estimate.rhs == pytest.approx(6.0)
        assert estimate.ratio_pi == pytest.approx(math.sqrt(5.5 / 6.0))

    def test_montecarlo_agrees_with_exact(self):
        g = build_graph(1)
        spec = laakso_chain(g)
        exact = functional(spec, GraphMetric(g), 2.0)
        sampled = functional(spec, GraphMetric(g), 2.0, mode="montecarlo", samples=20_000, seed=3)
        assert sampled.samples == 20_000
        assert sampled.rhs == pytest.approx(6.0)
        assert abs(sampled.lhs - exact.lhs) <= 5 * sampled.stderr

    @pytest.mark.parametrize("level", [1, 2])
    @pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
    def test_montecarlo_within_four_standard_errors(self, level: int, p: float):
        g = build_graph(level)
        spec = laakso_chain(g)
        exact = functional(spec, GraphMetric(g), p)
        sampled = functional(spec, GraphMetric(g), p, mode="montecarlo", samples=20_000, seed=3)
        assert sampled.stderr > 0
        assert abs(sampled.lhs - exact.lhs) <= 4 * sampled.stderr

    def test_montecarlo_is_independent_of_threads(self):
        g = build_graph(1)
        spec = laakso_chain(g)
        a = functional(spec, GraphMetric(g), 2.0, mode="montecarlo", samples=9000, threads=1)
        b = functional(spec, GraphMetric(g), 2.0, mode="montecarlo", samples=9000, threads=3)
        assert a == b

    def test_embedded_steps_have_unit_length(self):
        g = build_graph(2)
        estimate = functional(laakso_chain(g), chain_metric(g, "heisenberg"), 4.0)
        assert estimate.rhs == pytest.approx(36.0)
        assert 0.0 < estimate.ratio_pi < math.inf

    def test_errors(self):
        g = build_graph(1)
        spec = laakso_chain(g)
        metric = GraphMetric(g)
        with pytest.raises(ConfigurationError):
            functional(spec, metric, 0.5)
        with pytest.raises(ConfigurationError):
            functional(spec, GraphMetric(build_graph(2)), 2.0)
        with pytest.raises(ConfigurationError):
            functional(spec, metric, 2.0, mode="guess")
        with pytest.raises(ConfigurationError):
            functional(spec, metric, 2.0, mode="montecarlo", samples=1)
        with pytest.raises(CapExceededError, match="cap"):
            functional(spec, metric, 2.0, cost_cap=1)
        with pytest.raises(ConfigurationError):
            chain_metric(g, "euclidean")

    def test_first_coalesced_k(self):
        assert first_coalesced_k(1) == 1
        assert first_coalesced_k(6) == 3
        assert first_coalesced_k(8) == 4


class TestDriftWindows(HeislabTestCase):
    def test_window_height(self):
        assert window_height(1) == 1
        assert window_height(3) == 2
        assert window_height(5) == 2
        assert window_height(6) == 3

    def test_windows(self):
        windows = drift_windows(3, 1)
        assert len(windows) == 10
        np.testing.assert_array_equal(windows[:2], [43, 44])
        assert drift_windows(2, 1).size == 0
        with pytest.raises(ConfigurationError):
            drift_windows(3, 0)

    def test_restricted_sum_is_bounded_by_the_full_term(self):
        g = build_graph(3)
        spec = laakso_chain(g)
        metric = GraphMetric(g)
        full = functional(spec, metric, 2.0)
        restricted = restricted_drift_sum(spec, metric, 2.0, 1)
        assert 0.0 <= restricted <= full.terms[1] + 1e-9

    def test_restricted_sum_needs_a_laakso_chain(self):
        spec = ChainSpec.constant(2, t_max=3)
        with pytest.raises(ConfigurationError):
            restricted_drift_sum(spec, MatrixMetric(np.zeros((2, 2))), 2.0, 1)


class TestSweep(HeislabTestCase):
    def test_order(self):
        rows = sweep([1, 2], [2.0, 4.0], target="graph")
        assert [(r.level, r.p) for r in rows] == [(1, 2.0), (1, 4.0), (2, 2.0), (2, 4.0)]
        assert rows[0].lhs == pytest.approx(5.5)
        assert all(r.mode == "exact" and r.stderr is None for r in rows)

    def test_sweep_motif(self):
        (row,) = sweep([1], [2.0], target="graph", motif="planar-double-diamond")
        assert row.lhs == pytest.approx(16.0 / 3.0)
        assert row.rhs == pytest.approx(6.0)

    @pytest.mark.slow
    def test_growth_in_the_level(self):
        rows = sweep([1, 2, 3, 4], [2.0, 4.0])
        square = [r.ratio_pi for r in rows if r.p == 2.0]
        fourth = [r.ratio_pi for r in rows if r.p == 4.0]
        assert all(a < b for a, b in zip(square, square[1:]))
        assert max(fourth) <= 2 * min(fourth)
