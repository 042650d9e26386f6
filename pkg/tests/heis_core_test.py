import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heislab.common.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    RegistryKeyError,
)
from heislab.common.testing import HeislabTestCase
from heislab.heis_core import (
    HPoint,
    affine_midpoint,
    difference,
    dilate,
    distance,
    from_real,
    horizontal_lift,
    inverse,
    koranyi_norm,
    nh,
    product,
    random_points,
    real_product,
    rotate,
    symplectic,
    to_real,
)

coordinate = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
point_h1 = st.tuples(coordinate, coordinate, coordinate).map(lambda t: from_real(*t))


class TestGroupLaw(HeislabTestCase):
    def test_product_adds_half_the_symplectic_form(self):
        a = HPoint(np.array([1.0 + 0j]), 0.0)
        b = HPoint(np.array([1j]), 0.0)
        ab = a * b
        np.testing.assert_allclose(ab.horizontal, [1.0 + 1.0j])
        assert float(ab.center) == pytest.approx(0.5)
        assert float(product(b, a).center) == pytest.approx(-0.5)

    def test_inverse(self):
        a = random_points(self.rng, 50, 3)[0]
        e = product(a, inverse(a))
        np.testing.assert_allclose(e.horizontal, 0.0, atol=1e-12)
        np.testing.assert_allclose(e.center, 0.0, atol=1e-12)

    def test_associativity(self):
        a, b, c = random_points(self.rng, 100, 2, arity=3)
        left = product(product(a, b), c)
        right = product(a, product(b, c))
        np.testing.assert_allclose(left.horizontal, right.horizontal, atol=1e-12)
        np.testing.assert_allclose(left.center, right.center, rtol=1e-12, atol=1e-9)

    def test_symplectic_form(self):
        assert float(symplectic([1.0], [1j])) == pytest.approx(1.0)
        assert float(symplectic([1.0, 0.0], [0.0, 1.0])) == 0.0
        assert float(symplectic([1j], [1.0])) == pytest.approx(-1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            product(HPoint.identity(1), HPoint.identity(2))

    def test_real_model_agrees(self):
        p = (np.array([0.3, -1.0]), np.array([2.0, 0.5]), np.array([0.1, -0.7]))
        q = (np.array([1.5, 0.25]), np.array([-0.5, 3.0]), np.array([2.0, 0.0]))
        expected = product(from_real(*p), from_real(*q))
        x, y, z = real_product(p, q)
        np.testing.assert_allclose(x + 1j * y, expected.horizontal[:, 0])
        np.testing.assert_allclose(z, expected.center)
        back = to_real(from_real(*p))
        np.testing.assert_allclose(back[0][:, 0], p[0])
        np.testing.assert_allclose(back[2], p[2])


class TestKoranyi(HeislabTestCase):
    def test_known_values(self):
        assert float(distance(from_real(1, 0, 0), from_real(-1, 0, 0))) == pytest.approx(2.0)
        assert float(koranyi_norm(from_real(0, 0, 4))) == pytest.approx(2.0)
        assert float(koranyi_norm(from_real(3, 4, 0))) == pytest.approx(5.0)
        # (|h|^4 + c^2)^(1/4) with |h| = 1, c = 1
        assert float(koranyi_norm(from_real(1, 0, 1))) == pytest.approx(2.0**0.25)

    def test_nh_is_root_of_center(self):
        a = from_real(0, 0, 0)
        b = from_real(0, 0, 9)
        assert float(nh(difference(a, b))) == pytest.approx(3.0)
        assert float(nh(difference(from_real(1, 0, 0), from_real(2, 0, 0)))) == 0.0

    @settings(deadline=None, max_examples=200)
    @given(point_h1, point_h1, point_h1)
    def test_metric_axioms(self, a: HPoint, b: HPoint, c: HPoint):
        ab, bc, ac = (float(distance(*pair)) for pair in ((a, b), (b, c), (a, c)))
        assert ab == pytest.approx(float(distance(b, a)), rel=1e-9, abs=1e-9)
        assert ac <= ab + bc + 1e-9 * (1 + ab + bc)
        assert float(distance(a, a)) == 0.0

    @settings(deadline=None, max_examples=100)
    @given(point_h1, point_h1, point_h1)
    def test_left_invariance(self, g: HPoint, a: HPoint, b: HPoint):
        before = float(distance(a, b))
        after = float(distance(product(g, a), product(g, b)))
        assert after == pytest.approx(before, rel=1e-7, abs=1e-7)

    def test_dilation_scales_distances(self):
        a, b = random_points(self.rng, 100, 2, arity=2)
        np.testing.assert_allclose(
            distance(dilate(3.0, a), dilate(3.0, b)), 3.0 * distance(a, b), rtol=1e-12
        )
        with pytest.raises(ConfigurationError):
            dilate(0.0, a)

    def test_rotation_is_an_isometry(self):
        a, b = random_points(self.rng, 100, 3, arity=2)
        np.testing.assert_allclose(
            distance(rotate(a, 1, 0.7), rotate(b, 1, 0.7)), distance(a, b), rtol=1e-12
        )
        with pytest.raises(DimensionMismatchError):
            rotate(a, 3, 0.1)

    def test_affine_midpoint(self):
        m = affine_midpoint(from_real(-1, 0, 2), from_real(1, 2, 0))
        np.testing.assert_allclose(m.horizontal, [1.0j])
        assert float(m.center) == 1.0


class TestHorizontalLift(HeislabTestCase):
    def test_unit_square_encloses_area_one(self):
        lifted = horizontal_lift([0, 1, 1 + 1j, 1j, 0])
        assert lifted.center[-1] == pytest.approx(1.0)
        # Consecutive lifted points differ by horizontal steps only.
        steps = difference(lifted[:-1], lifted[1:])
        np.testing.assert_allclose(steps.center, 0.0, atol=1e-15)

    def test_lifted_segments_have_planar_length(self):
        lifted = horizontal_lift([0, 2, 2 + 3j])
        np.testing.assert_allclose(distance(lifted[:-1], lifted[1:]), [2.0, 3.0])


class TestSamplers(HeislabTestCase):
    @pytest.mark.parametrize("sampler", ["gaussian", "near-geodesic", "near-vertical"])
    def test_shapes(self, sampler: str):
        points = random_points(self.rng, 17, 4, sampler, arity=3)
        assert len(points) == 3
        for p in points:
            assert p.batch_shape == (17,)
            assert p.dim == 4
            assert np.all(np.isfinite(p.center))

    def test_unknown_sampler(self):
        with pytest.raises(RegistryKeyError):
            random_points(self.rng, 3, 1, "uniform")

    def test_bad_dimension(self):
        with pytest.raises(ConfigurationError):
            random_points(self.rng, 3, 0)

    def test_seeded(self):
        a = random_points(np.random.default_rng(3), 5, 2)[0]
        b = random_points(np.random.default_rng(3), 5, 2)[0]
        np.testing.assert_array_equal(a.horizontal, b.horizontal)
        assert math.isfinite(float(koranyi_norm(a[0])))
