import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heislab.common.exceptions import ConfigurationError, DegenerateConfigurationError
from heislab.common.testing import HeislabTestCase
from heislab.heis_core import HPoint
from heislab.inequalities import (
    SUITE_CHUNK,
    InequalityCheck,
    brute_force_min_omega,
    check_fork_collapse,
    check_four_point,
    check_midpoint,
    check_shrink,
    check_small_angle,
    check_symplectic_projection,
    fork_gap,
    fork_suite,
    run_suite,
    symplectic_collapse_search,
    synthetic_fork,
    vectors_from_csv,
)

ORIGIN = HPoint(0.0, 0.0)
EAST = HPoint(1.0, 0.0)
WEST = HPoint(-1.0, 0.0)

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


class TestPointwise(HeislabTestCase):
    def test_midpoint_equality(self):
        report = check_midpoint(WEST, ORIGIN, EAST)
        assert report.lhs == pytest.approx(1.0)
        assert report.rhs == pytest.approx(1.0)
        assert report.margin == pytest.approx(0.0, abs=1e-12)
        assert report.holds()

    def test_midpoint_all_equal(self):
        report = check_midpoint(EAST, EAST, EAST)
        assert report.margin == 0.0
        assert report.holds()

    def test_shrink(self):
        report = check_shrink(EAST, WEST, ORIGIN)
        assert report.lhs == pytest.approx(32.0)
        assert report.rhs == pytest.approx(16.0)
        assert report.margin == pytest.approx(16.0)
        assert report.scale == pytest.approx(32.0)

    def test_four_point(self):
        assert check_four_point(EAST, EAST, EAST, EAST).margin == 0.0
        report = check_four_point(ORIGIN, ORIGIN, EAST, EAST)
        assert report.lhs == pytest.approx(1.0)
        assert report.rhs == pytest.approx(0.125)
        assert report.margin == pytest.approx(0.875)

    def test_batches(self):
        u, v, w = (
            HPoint(self.rng.standard_normal((7, 2)) + 1j * self.rng.standard_normal((7, 2)), 0.0)
            for _ in range(3)
        )
        report = check_midpoint(u, v, w)
        assert np.shape(report.margin) == (7,)
        assert np.shape(report.holds()) == (7,)

    @settings(deadline=None)
    @given(finite, finite, finite, finite, finite, finite)
    def test_midpoint_holds(self, a, b, c, d, e, f):
        report = check_midpoint(HPoint(a + 1j * b, c), HPoint(d, e), HPoint(f, 0.0))
        assert report.holds()

    def test_symplectic_projection(self):
        report = check_symplectic_projection(1.0, 1j)
        assert report.margin == pytest.approx(0.0, abs=1e-15)
        assert report.margins["theta"] == pytest.approx(math.pi / 2)
        parallel = check_symplectic_projection(1.0, 1.0)
        assert parallel.lhs == pytest.approx(0.0)
        assert parallel.rhs == 0.0
        assert parallel.margins["theta"] == pytest.approx(math.pi)

    def test_symplectic_projection_zero_vector(self):
        with pytest.raises(DegenerateConfigurationError):
            check_symplectic_projection(0.0, 1.0)

    @settings(deadline=None)
    @given(finite, finite, finite, finite, finite, finite, finite, finite)
    def test_symplectic_projection_holds(self, a, b, c, d, e, f, g, h):
        x = np.array([a + 1j * b, c + 1j * d])
        y = np.array([e + 1j * f, g + 1j * h])
        if np.linalg.norm(x) < 1e-6 or np.linalg.norm(y) < 1e-6:
            return
        assert check_symplectic_projection(x, y).holds(1e-12)


class TestForks(HeislabTestCase):
    def test_geodesic_fork_has_no_gap(self):
        assert fork_gap(WEST, ORIGIN, EAST, EAST) == pytest.approx(0.0, abs=1e-15)

    def test_gap_is_symmetric_in_the_tips(self):
        tip = HPoint(1.0 + 0.1j, 0.02)
        assert fork_gap(WEST, ORIGIN, EAST, tip) == fork_gap(WEST, ORIGIN, tip, EAST)
        assert fork_gap(WEST, ORIGIN, EAST, tip) > 0.0

    def test_coincident_base(self):
        with pytest.raises(DegenerateConfigurationError):
            fork_gap(ORIGIN, ORIGIN, EAST, EAST)

    def test_small_angle_on_a_geodesic(self):
        report = check_small_angle(EAST, WEST)
        assert report.applicable
        assert report.margins["theta"] == pytest.approx(0.0, abs=1e-12)
        assert report.margins["eta"] == pytest.approx(0.0, abs=1e-12)
        assert report.margins["nu"] == pytest.approx(0.0, abs=1e-12)
        assert report.margins["delta"] == pytest.approx(0.0, abs=1e-12)
        assert report.holds()

    def test_small_angle_outside_the_gate(self):
        report = check_small_angle(EAST, HPoint(1j, 0.0))
        assert not report.applicable
        assert math.isnan(report.margin)
        assert "fork gap" in report.reason
        assert report.holds()

    def test_fork_collapse_on_a_geodesic(self):
        report = check_fork_collapse(WEST, ORIGIN, EAST, EAST)
        assert report.applicable
        assert report.margin == pytest.approx(0.0, abs=1e-12)
        assert report.holds()

    def test_fork_collapse_with_horizontal_tips(self):
        s = 1e-3
        report = check_fork_collapse(WEST, ORIGIN, EAST, HPoint(1.0 + 1j * s, s / 2))
        assert report.applicable
        assert report.margins["delta"] < 1e-4
        assert report.rhs == pytest.approx(s)
        assert report.margin > 0.0

    def test_fork_collapse_with_vertical_tips(self):
        report = check_fork_collapse(WEST, ORIGIN, EAST, HPoint(1.0, 1e-3))
        assert not report.applicable
        assert math.isnan(report.margin)
        assert "vertically" in report.reason
        assert report.holds()

    def test_synthetic_forks_are_nearly_geodesic(self):
        scales = np.full(200, 1e-6)
        z0, z1, z2, z2p = synthetic_fork(self.rng, scales, dim=2)
        gaps = fork_gap(z0, z1, z2, z2p)
        assert np.shape(gaps) == (200,)
        assert np.all(gaps < 1e-4)

    def test_fork_suite(self):
        report = fork_suite(count=500, dims=(1, 2))
        assert report.passed
        assert len(report.rows) == 4
        assert {row.check for row in report.rows} == {"fork-collapse", "small-angle"}
        assert all(row.applicable > 0 for row in report.rows)

    def test_fork_suite_validation(self):
        with pytest.raises(ConfigurationError):
            fork_suite(count=0)
        with pytest.raises(ConfigurationError):
            fork_suite(count=10, delta_range=(1e-4, 1e-8))


class TestSuites(HeislabTestCase):
    def test_registry(self):
        assert InequalityCheck.list_available()[0] == "four-point"
        assert set(InequalityCheck.list_available()) == {
            "midpoint",
            "shrink",
            "four-point",
            "symplectic-projection",
        }

    @pytest.mark.parametrize(
        "checker", ["midpoint", "shrink", "four-point", "symplectic-projection"]
    )
    def test_suite_passes(self, checker: str):
        report = run_suite(checker, count=2000, dims=(1, 2))
        assert report.passed
        assert report.count == 2000 * 2 * 3
        assert len(report.rows) == 6
        row = report.rows[0]
        assert row.worst_inputs is not None
        assert len(row.worst_inputs) == InequalityCheck.by_name(checker).arity

    def test_suite_is_independent_of_threads(self):
        kwargs = dict(count=SUITE_CHUNK + 10, dims=(1,), samplers=["gaussian"], seed=4)
        a = run_suite("symplectic-projection", threads=1, **kwargs)
        b = run_suite("symplectic-projection", threads=2, **kwargs)
        assert a == b

    def test_suite_validation(self):
        with pytest.raises(ConfigurationError):
            run_suite("triangle")
        with pytest.raises(ConfigurationError):
            run_suite("midpoint", count=0)
        with pytest.raises(ConfigurationError):
            run_suite("midpoint", count=10, dims=(0,))


class TestCollapseSearch(HeislabTestCase):
    def test_orthogonal_pair(self):
        result = symplectic_collapse_search([[1.0], [1j]], ell=2.0)
        assert result.pair == (0, 1)
        assert result.omega == pytest.approx(1.0)
        assert result.brute_force_min == pytest.approx(1.0)
        assert result.brute_force_beats is False

    def test_real_vectors_collapse(self):
        result = symplectic_collapse_search([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], ell=4.0)
        assert result.omega == 0.0
        assert result.pair == (0, 1)
        assert result.within_bound

    def test_brute_force(self):
        vectors = np.array([[1.0 + 0j], [1j], [1.0 + 0.1j]])
        pair, value = brute_force_min_omega(vectors)
        assert pair == (0, 2)
        assert value == pytest.approx(0.1)

    def test_errors(self):
        with pytest.raises(DegenerateConfigurationError):
            symplectic_collapse_search([[1.0]], ell=4.0)
        with pytest.raises(ConfigurationError):
            symplectic_collapse_search([[1.0], [1j]], ell=0.0)

    def test_random_instances(self):
        for _ in range(100):
            n_vectors = int(self.rng.integers(256, 513))
            ell = float(self.rng.uniform(8.0, 24.0))
            dim = int(self.rng.choice([2, 8]))
            z = self.rng.standard_normal((n_vectors, dim)) + 1j * self.rng.standard_normal(
                (n_vectors, dim)
            )
            radius = ell * math.sqrt(math.log2(ell))
            target = radius * self.rng.uniform(0.5, 1.0, size=n_vectors)
            z *= (target / np.linalg.norm(z, axis=1))[:, None]
            result = symplectic_collapse_search(z, ell)
            assert result.hypotheses_hold
            assert result.omega >= result.brute_force_min
            assert result.within_bound
            assert result.rounds >= 1

    def test_vectors_from_csv(self):
        path = self.TEST_DIR / "vectors.csv"
        path.write_text("re1,im1,re2,im2\n1,0,0,1\n0,2,3,0\n")
        np.testing.assert_array_equal(vectors_from_csv(path), [[1, 1j], [2j, 3]])

    def test_vectors_from_csv_without_header(self):
        path = self.TEST_DIR / "vectors.csv"
        path.write_text("1,2\n3,4\n")
        np.testing.assert_array_equal(vectors_from_csv(path), [[1 + 2j], [3 + 4j]])

    def test_vectors_from_csv_errors(self):
        path = self.TEST_DIR / "vectors.csv"
        path.write_text("1,2,3\n")
        with pytest.raises(ConfigurationError):
            vectors_from_csv(path)
        path.write_text("re,im\n")
        with pytest.raises(ConfigurationError):
            vectors_from_csv(path)
