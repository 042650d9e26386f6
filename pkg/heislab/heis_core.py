"""
Arithmetic on the Heisenberg group :math:`H_d` in its complex model.

A point is a pair ``(h, c)`` of a horizontal vector ``h`` in :math:`\\mathbb{C}^d` and a real
center ``c``. The group law is

.. math::

    (h, c) \\cdot (h', c') = (h + h', c + c' + \\tfrac{1}{2} \\omega(h, h')),
    \\qquad \\omega(x, y) = \\sum_i \\operatorname{Im}(\\bar{x}_i y_i),

and distances are measured with the Koranyi gauge :math:`N(h, c) = (\\|h\\|^4 + c^2)^{1/4}`,
:math:`d(a, b) = N(a^{-1} b)`.

:class:`HPoint` holds a whole batch of points at once: ``horizontal`` has shape
``(*batch, d)`` and ``center`` has shape ``batch``. Every function in this module broadcasts
over the batch dimensions the way numpy does.

The real model of :math:`H_1` with coordinates ``(x, y, z)`` is identified with the complex
model through ``(x + iy, z)``; see :func:`from_real` and :func:`to_real`.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from .common.exceptions import ConfigurationError, DimensionMismatchError
from .common.registrable import Registrable

ArrayLike = Union[float, complex, Sequence, np.ndarray]


@dataclass(frozen=True, eq=False)
class HPoint:
    """
    One point, or a batch of points, of :math:`H_d`.
    """

    horizontal: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        horizontal = np.asarray(self.horizontal, dtype=np.complex128)
        if horizontal.ndim == 0:
            horizontal = horizontal.reshape(1)
        if horizontal.shape[-1] < 1:
            raise DimensionMismatchError("points of H_d need dimension d >= 1")
        center = np.asarray(self.center, dtype=np.float64)
        try:
            center = np.broadcast_to(center, horizontal.shape[:-1])
        except ValueError:
            raise DimensionMismatchError(
                f"center of shape {center.shape} does not match horizontal batch shape "
                f"{horizontal.shape[:-1]}"
            )
        object.__setattr__(self, "horizontal", horizontal)
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return self.horizontal.shape[-1]

    @property
    def batch_shape(self) -> Tuple[int, ...]:
        return self.horizontal.shape[:-1]

    def __len__(self) -> int:
        if not self.batch_shape:
            raise TypeError("a single HPoint has no length")
        return self.batch_shape[0]

    def __getitem__(self, index) -> "HPoint":
        if not self.batch_shape:
            raise TypeError("a single HPoint cannot be indexed")
        return HPoint(self.horizontal[index], self.center[index])

    def __mul__(self, other: "HPoint") -> "HPoint":
        return product(self, other)

    def __repr__(self) -> str:
        return f"HPoint(horizontal={self.horizontal!r}, center={self.center!r})"

    @classmethod
    def identity(cls, dim: int = 1, batch_shape: Tuple[int, ...] = ()) -> "HPoint":
        return cls(np.zeros(tuple(batch_shape) + (dim,), dtype=np.complex128), 0.0)

    @classmethod
    def stack(cls, points: Sequence["HPoint"], axis: int = 0) -> "HPoint":
        if not points:
            raise DimensionMismatchError("cannot stack an empty sequence of points")
        dims = {p.dim for p in points}
        if len(dims) != 1:
            raise DimensionMismatchError(f"cannot stack points of dimensions {sorted(dims)}")
        return cls(
            np.stack([p.horizontal for p in points], axis=axis),
            np.stack([p.center for p in points], axis=axis),
        )


def _check_same_dim(a: HPoint, b: HPoint):
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


def symplectic(x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """
    The symplectic form :math:`\\omega(x, y) = \\sum_i \\operatorname{Im}(\\bar{x}_i y_i)`,
    taken over the last axis.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.ndim == 0:
        x = x.reshape(1)
    if y.ndim == 0:
        y = y.reshape(1)
    if x.shape[-1] != y.shape[-1]:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    return np.sum((np.conj(x) * y).imag, axis=-1)


def real_inner(x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """
    The real inner product :math:`\\operatorname{Re}\\langle x, y \\rangle` over the last axis.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape[-1:] != y.shape[-1:]:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape[-1:]} vs {y.shape[-1:]}")
    return np.sum((np.conj(x) * y).real, axis=-1)


def vector_norm(x: ArrayLike) -> np.ndarray:
    return np.linalg.norm(np.asarray(x, dtype=np.complex128), axis=-1)


def product(a: HPoint, b: HPoint) -> HPoint:
    _check_same_dim(a, b)
    return HPoint(
        a.horizontal + b.horizontal,
        a.center + b.center + 0.5 * symplectic(a.horizontal, b.horizontal),
    )


def inverse(a: HPoint) -> HPoint:
    return HPoint(-a.horizontal, -a.center)


def _gauge(horizontal_norm: np.ndarray, center: np.ndarray) -> np.ndarray:
    # (|h|^4 + c^2)^(1/4) without overflowing the fourth power.
    return np.sqrt(np.hypot(horizontal_norm**2, center))


def koranyi_norm(a: HPoint) -> np.ndarray:
    return _gauge(vector_norm(a.horizontal), a.center)


def _difference(a: HPoint, b: HPoint) -> Tuple[np.ndarray, np.ndarray]:
    """Horizontal part and center of ``a^{-1} b``."""
    _check_same_dim(a, b)
    horizontal = b.horizontal - a.horizontal
    center = b.center - a.center - 0.5 * symplectic(a.horizontal, b.horizontal)
    return horizontal, center


def distance(a: HPoint, b: HPoint) -> np.ndarray:
    """
    The Koranyi distance :math:`N(a^{-1} b)`. Symmetric and left invariant.
    """
    horizontal, center = _difference(a, b)
    return _gauge(vector_norm(horizontal), center)


def difference(a: HPoint, b: HPoint) -> HPoint:
    """The group element :math:`a^{-1} b`."""
    return HPoint(*_difference(a, b))


def dilate(lam: float, a: HPoint) -> HPoint:
    """The dilation :math:`\\delta_\\lambda(h, c) = (\\lambda h, \\lambda^2 c)`."""
    if not lam > 0:
        raise ConfigurationError(f"dilation factor must be positive, got {lam}")
    return HPoint(lam * a.horizontal, lam * lam * a.center)


def nh(a: HPoint) -> np.ndarray:
    """
    How far ``a`` is from being horizontal: the distance from ``(h, 0)`` to ``(h, c)``,
    which is :math:`|c|^{1/2}`.
    """
    return np.sqrt(np.abs(a.center))


def plane_project(a: HPoint) -> np.ndarray:
    """The homomorphism onto the horizontal layer. It is 1-Lipschitz."""
    return a.horizontal.copy()


def rotate(a: HPoint, plane_index: int, angle: float) -> HPoint:
    """
    Rotates the complex coordinate ``plane_index`` of the horizontal part by ``angle``.
    Such rotations are isometric automorphisms.
    """
    if not 0 <= plane_index < a.dim:
        raise DimensionMismatchError(
            f"plane index {plane_index} is out of range for dimension {a.dim}"
        )
    horizontal = a.horizontal.copy()
    horizontal[..., plane_index] *= np.exp(1j * angle)
    return HPoint(horizontal, a.center)


def affine_midpoint(a: HPoint, b: HPoint) -> HPoint:
    """
    The midpoint of the affine segment from ``a`` to ``b`` in the ``(h, c)`` chart.
    This is not the metric midpoint.
    """
    _check_same_dim(a, b)
    return HPoint(0.5 * (a.horizontal + b.horizontal), 0.5 * (a.center + b.center))


def from_real(x: ArrayLike, y: ArrayLike, z: ArrayLike) -> HPoint:
    """
    Maps points ``(x, y, z)`` of the real model to the complex model. ``x`` and ``y`` may
    carry a trailing dimension axis; scalars and 1-d batches are read as points of :math:`H_1`.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"x and y shapes differ: {x.shape} vs {y.shape}")
    horizontal = x + 1j * y
    if horizontal.ndim == z.ndim:
        horizontal = horizontal[..., None]
    return HPoint(horizontal, z)


def to_real(a: HPoint) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return a.horizontal.real.copy(), a.horizontal.imag.copy(), a.center.copy()


def real_product(
    p: Tuple[ArrayLike, ArrayLike, ArrayLike], q: Tuple[ArrayLike, ArrayLike, ArrayLike]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    The group law of the real model:
    ``(x, y, z)(x', y', z') = (x + x', y + y', z + z' + (x.y' - y.x') / 2)``.
    """
    x1, y1, z1 = (np.asarray(v, dtype=np.float64) for v in p)
    x2, y2, z2 = (np.asarray(v, dtype=np.float64) for v in q)
    if x1.ndim > z1.ndim and x2.ndim > z2.ndim and x1.shape[-1] != x2.shape[-1]:
        raise DimensionMismatchError(f"dimension mismatch: {x1.shape[-1]} vs {x2.shape[-1]}")
    cross = x1 * y2 - y1 * x2
    if cross.ndim > np.ndim(z1 + z2):
        cross = cross.sum(axis=-1)
    return x1 + x2, y1 + y2, z1 + z2 + 0.5 * cross


def horizontal_lift(planar_path: ArrayLike, base: float = 0.0) -> HPoint:
    """
    Lifts a polyline in the horizontal layer to the horizontal polyline starting at center
    ``base``. Each segment contributes :math:`\\tfrac{1}{2}\\omega(p_i, p_{i+1})`, the area it
    sweeps as seen from the origin.

    ``planar_path`` has shape ``(N,)`` for :math:`H_1` or ``(N, d)``.
    """
    path = np.asarray(planar_path, dtype=np.complex128)
    if path.ndim == 1:
        path = path[:, None]
    if path.shape[0] < 1:
        raise DimensionMismatchError("cannot lift an empty path")
    increments = 0.5 * symplectic(path[:-1], path[1:])
    centers = base + np.concatenate([[0.0], np.cumsum(increments)])
    return HPoint(path, centers)


class PointSampler(Registrable):
    """
    Draws random tuples of points for the randomized inequality suites.

    :meth:`sample()` returns ``arity`` batches of ``count`` points each; the ``i``-th entries
    of the batches form one sample.
    """

    default_implementation = "gaussian"

    def sample(
        self, rng: np.random.Generator, count: int, dim: int, arity: int = 1
    ) -> List[HPoint]:
        raise NotImplementedError()

    @staticmethod
    def _complex_normal(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@PointSampler.register("gaussian")
class GaussianSampler(PointSampler):
    """
    Horizontal entries with independent standard normal real and imaginary parts. Centers are
    normal with standard deviation :math:`\\|h\\|^2`, so both parts of the gauge have
    comparable size.
    """

    def sample(self, rng, count, dim, arity=1):
        points = []
        for _ in range(arity):
            horizontal = self._complex_normal(rng, (count, dim))
            scale = vector_norm(horizontal) ** 2
            points.append(HPoint(horizontal, scale * rng.standard_normal(count)))
        return points


@PointSampler.register("near-geodesic")
class NearGeodesicSampler(PointSampler):
    """
    Points close to one horizontal line: ``g (t e + eps u, eps^2 w)`` with a shared random
    base ``g`` and unit direction ``e`` per sample, and ``eps`` log-uniform in ``[1e-6, 1e-1]``.
    These are the near-equality cases of the convexity inequalities.
    """

    def sample(self, rng, count, dim, arity=1):
        base = GaussianSampler().sample(rng, count, dim)[0]
        direction = self._complex_normal(rng, (count, dim))
        direction /= vector_norm(direction)[:, None]
        eps = 10.0 ** rng.uniform(-6.0, -1.0, size=count)
        points = []
        for _ in range(arity):
            t = rng.standard_normal(count)
            horizontal = (
                t[:, None] * direction + eps[:, None] * self._complex_normal(rng, (count, dim))
            )
            center = eps**2 * rng.standard_normal(count)
            points.append(product(base, HPoint(horizontal, center)))
        return points


@PointSampler.register("near-vertical")
class NearVerticalSampler(PointSampler):
    """
    Points ``g (eps u, w)`` whose differences are dominated by the center.
    """

    def sample(self, rng, count, dim, arity=1):
        base = GaussianSampler().sample(rng, count, dim)[0]
        eps = 10.0 ** rng.uniform(-6.0, -1.0, size=count)
        points = []
        for _ in range(arity):
            horizontal = eps[:, None] * self._complex_normal(rng, (count, dim))
            points.append(product(base, HPoint(horizontal, rng.standard_normal(count))))
        return points


def random_points(
    rng: np.random.Generator,
    count: int,
    dim: int,
    sampler: str = "gaussian",
    arity: int = 1,
) -> List[HPoint]:
    """
    Draws ``arity`` batches of ``count`` points of :math:`H_{dim}` with the named sampler.
    """
    if dim < 1:
        raise ConfigurationError(f"dimension must be at least 1, got {dim}")
    return PointSampler.by_name(sampler)().sample(rng, count, dim, arity)
