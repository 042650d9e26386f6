"""
Numerical checkers for the pointwise inequalities of Heisenberg geometry that the
non-embeddability argument relies on, and seeded randomized suites that run them at scale.

Every checker returns a :class:`MarginReport` whose ``margin`` is ``lhs - rhs`` oriented so that
``margin >= 0`` means the inequality holds. All checkers broadcast over batches of points.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .common.exceptions import ConfigurationError, DegenerateConfigurationError
from .common.registrable import Registrable
from .common.util import chunk_bounds, chunked_map, spawn_generators
from .heis_core import (
    HPoint,
    PointSampler,
    affine_midpoint,
    difference,
    distance,
    koranyi_norm,
    nh,
    product,
    random_points,
    real_inner,
    symplectic,
    vector_norm,
)

logger = logging.getLogger(__name__)

SUITE_TOLERANCE = 1e-9

SYMPLECTIC_TOLERANCE = 1e-12

FORK_GATE = 1e-4

FORK_DELTA_RANGE = (1e-8, 1e-4)

SUITE_CHUNK = 2**16

BRUTE_FORCE_LIMIT = 2048

Value = Union[float, np.ndarray]


def _value(x: Any) -> Value:
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


@dataclass
class MarginReport:
    name: str
    lhs: Value
    rhs: Value
    margin: Value
    scale: Value
    applicable: Union[bool, np.ndarray] = True
    reason: Optional[str] = None
    margins: Dict[str, Value] = field(default_factory=dict)
    inputs: Dict[str, Any] = field(default_factory=dict, repr=False)

    def holds(self, tolerance: float = SUITE_TOLERANCE) -> Union[bool, np.ndarray]:
        """
        Whether the inequality holds up to ``-tolerance * scale``. Inputs outside a
        checker's hypotheses count as holding.
        """
        with np.errstate(invalid="ignore"):
            ok = np.asarray(self.margin) >= -tolerance * np.asarray(self.scale)
        result = np.logical_or(ok, np.logical_not(self.applicable))
        return bool(result) if result.ndim == 0 else result


def _fourth(x: np.ndarray) -> np.ndarray:
    return np.square(np.square(x))


def _unit_angle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    The angle between vectors ``a`` and ``b`` of :math:`\\mathbb{C}^d = \\mathbb{R}^{2d}`
    under the real inner product, ``2 atan2(|a' - b'|, |a' + b'|)`` on unit vectors.
    """
    a_hat = a / vector_norm(a)[..., None]
    b_hat = b / vector_norm(b)[..., None]
    return 2.0 * np.arctan2(vector_norm(a_hat - b_hat), vector_norm(a_hat + b_hat))


def check_midpoint(u: HPoint, v: HPoint, w: HPoint) -> MarginReport:
    """
    The midpoint inequality

    .. math::

        \\tfrac{1}{2}(d(u,v)^4 + d(v,w)^4) \\ge (d(u,w)/2)^4 + d(m, v)^4
            + \\tfrac{1}{16} NH(u^{-1}w)^4

    with ``m`` the affine midpoint of ``u`` and ``w``.
    """
    uv = _fourth(distance(u, v))
    vw = _fourth(distance(v, w))
    uw = _fourth(distance(u, w) / 2.0)
    mv = _fourth(distance(affine_midpoint(u, w), v))
    vertical = _fourth(nh(difference(u, w))) / 16.0
    lhs = 0.5 * (uv + vw)
    rhs = uw + mv + vertical
    scale = np.maximum.reduce([uv, vw, uw, mv, vertical])
    return MarginReport(
        "midpoint",
        _value(lhs),
        _value(rhs),
        _value(lhs - rhs),
        _value(scale),
        inputs={"u": u, "v": v, "w": w},
    )


def check_shrink(u: HPoint, v: HPoint, w: HPoint) -> MarginReport:
    """
    Midpoints towards a common ``w`` cannot shrink ``d(u, v)`` by more than the vertical
    parts allow:
    :math:`32 [d(m_{uw}, m_{vw})^4 + NH(u^{-1}w)^4 + NH(v^{-1}w)^4] \\ge d(u, v)^4`.
    """
    mids = _fourth(distance(affine_midpoint(u, w), affine_midpoint(v, w)))
    vertical_u = _fourth(nh(difference(u, w)))
    vertical_v = _fourth(nh(difference(v, w)))
    lhs = 32.0 * (mids + vertical_u + vertical_v)
    rhs = _fourth(distance(u, v))
    scale = np.maximum.reduce([lhs, rhs])
    return MarginReport(
        "shrink",
        _value(lhs),
        _value(rhs),
        _value(lhs - rhs),
        _value(scale),
        inputs={"u": u, "v": v, "w": w},
    )


def check_four_point(x: HPoint, y: HPoint, z: HPoint, w: HPoint) -> MarginReport:
    """
    The four point inequality behind Markov 4-convexity:

    .. math::

        \\tfrac{1}{2}(2 d(x,y)^4 + d(y,w)^4 + d(y,z)^4) \\ge
            \\tfrac{1}{16}(d(x,w)^4 + d(x,z)^4) + \\tfrac{1}{512} d(z,w)^4
    """
    xy = _fourth(distance(x, y))
    yw = _fourth(distance(y, w))
    yz = _fourth(distance(y, z))
    xw = _fourth(distance(x, w))
    xz = _fourth(distance(x, z))
    zw = _fourth(distance(z, w))
    lhs = 0.5 * (2.0 * xy + yw + yz)
    rhs = (xw + xz) / 16.0 + zw / 512.0
    scale = np.maximum.reduce([xy, yw, yz, xw, xz, zw])
    return MarginReport(
        "four-point",
        _value(lhs),
        _value(rhs),
        _value(lhs - rhs),
        _value(scale),
        inputs={"x": x, "y": y, "z": z, "w": w},
    )


def check_symplectic_projection(x, y) -> MarginReport:
    """
    :math:`|\\omega(x, y)| \\le \\|x\\| \\|y\\| |\\sin\\theta|` for the exterior angle
    :math:`\\theta` of ``x`` and ``y`` under the real inner product. The right side is the
    area of the parallelogram spanned by ``x`` and ``y``.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.ndim == 0:
        x = x.reshape(1)
    if y.ndim == 0:
        y = y.reshape(1)
    x_norm = vector_norm(x)
    y_norm = vector_norm(y)
    if np.any(x_norm == 0) or np.any(y_norm == 0):
        raise DegenerateConfigurationError("the angle of a zero vector is undefined")
    along = real_inner(x, y) / np.square(x_norm)
    y_perp = y - along[..., None] * x
    area = x_norm * vector_norm(y_perp)
    omega = np.abs(symplectic(x, y))
    theta = math.pi - _unit_angle(x, y)
    return MarginReport(
        "symplectic-projection",
        _value(area),
        _value(omega),
        _value(area - omega),
        _value(x_norm * y_norm),
        margins={"theta": _value(theta)},
        inputs={"x": x, "y": y},
    )


def _triple_gap(a: HPoint, b: HPoint, c: HPoint) -> np.ndarray:
    # Best rescaling against the path a - b - c with edge lengths 1, 1 and 2.
    ratios = np.stack([distance(a, b), distance(b, c), distance(a, c) / 2.0])
    low = ratios.min(axis=0)
    high = ratios.max(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(low > 0, high / np.where(low > 0, low, 1.0) - 1.0, np.inf)


def fork_gap(z0: HPoint, z1: HPoint, z2: HPoint, z2p: HPoint) -> Value:
    """
    The smallest ``delta`` such that both ``{z0, z1, z2}`` and ``{z0, z1, z2p}`` are
    ``(1 + delta)``-bi-Lipschitz to the three point path, each triple under its own best
    scaling. Coincident tips give an infinite gap.
    """
    if np.any(distance(z0, z1) == 0):
        raise DegenerateConfigurationError("a fork needs distinct z0 and z1")
    return _value(np.maximum(_triple_gap(z0, z1, z2), _triple_gap(z0, z1, z2p)))


def check_small_angle(z: HPoint, zp: HPoint) -> MarginReport:
    """
    For a nearly geodesic triple ``{z, identity, zp}`` with gap ``delta < 1e-4``, the
    horizontal parts of ``z`` and ``zp`` point in nearly opposite directions and both points
    are nearly horizontal:

    * ``|theta| <= 400 delta^(1/2)`` for the angle ``theta`` between ``x`` and ``-x'``,
    * ``eta = NH(z) / N(z) <= 20 delta^(1/4)``,
    * ``nu = NH(zp) / N(zp) <= 20 delta^(1/4)``.

    ``margin`` is the smallest of the three margins, which are also listed in ``margins``.
    """
    origin = HPoint.identity(z.dim, z.batch_shape)
    delta = np.asarray(fork_gap(z, origin, zp, zp))
    x, xp = z.horizontal, zp.horizontal
    degenerate = (vector_norm(x) == 0) | (vector_norm(xp) == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(degenerate, math.pi, _unit_angle(x, -xp))
        eta = nh(z) / koranyi_norm(z)
        nu = nh(zp) / koranyi_norm(zp)
    root = np.sqrt(delta)
    quarter = np.sqrt(root)
    margins = {
        "theta": 400.0 * root - np.abs(theta),
        "eta": 20.0 * quarter - eta,
        "nu": 20.0 * quarter - nu,
    }
    margin = np.minimum.reduce(list(margins.values()))
    applicable = delta < FORK_GATE
    reason = None
    if np.ndim(applicable) == 0 and not applicable:
        reason = f"fork gap {float(delta):.3g} is not below {FORK_GATE:g}"
    return MarginReport(
        "small-angle",
        _value(margin),
        0.0,
        _value(np.where(applicable, margin, np.nan)),
        1.0,
        applicable=_applicable(applicable),
        reason=reason,
        margins={**{k: _value(v) for k, v in margins.items()}, "delta": _value(delta)},
        inputs={"z": z, "zp": zp},
    )


def _applicable(mask: np.ndarray) -> Union[bool, np.ndarray]:
    mask = np.asarray(mask)
    return bool(mask) if mask.ndim == 0 else mask


def check_fork_collapse(z0: HPoint, z1: HPoint, z2: HPoint, z2p: HPoint) -> MarginReport:
    """
    The tips of a nearly geodesic fork nearly coincide:
    ``d(z2, z2p) <= 2000 delta^(1/2) d(z0, z1)``.

    Applies when ``delta < 1e-4`` and the tips differ mostly horizontally,
    ``NH(z2^{-1} z2p) < d(z2, z2p) / 2``. Distances are left invariant, so the fork does not
    need to be based at the identity.
    """
    delta = np.asarray(fork_gap(z0, z1, z2, z2p))
    base = distance(z0, z1)
    tips = distance(z2, z2p)
    vertical = nh(difference(z2, z2p))
    bound = 2000.0 * np.sqrt(delta) * base
    small = delta < FORK_GATE
    horizontal = (tips == 0) | (vertical < 0.5 * tips)
    applicable = small & horizontal
    reason = None
    if np.ndim(applicable) == 0 and not applicable:
        if not small:
            reason = f"fork gap {float(delta):.3g} is not below {FORK_GATE:g}"
        else:
            reason = "the tips differ mostly vertically: NH(z2^-1 z2p) >= d(z2, z2p) / 2"
    with np.errstate(invalid="ignore"):
        margin = np.where(applicable, bound - tips, np.nan)
    return MarginReport(
        "fork-collapse",
        _value(bound),
        _value(tips),
        _value(margin),
        _value(base),
        applicable=_applicable(applicable),
        reason=reason,
        margins={"delta": _value(delta)},
        inputs={"z0": z0, "z1": z1, "z2": z2, "z2p": z2p},
    )


def _complex_normal(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def synthetic_fork(
    rng: np.random.Generator, delta_scale, dim: int = 1
) -> Tuple[HPoint, HPoint, HPoint, HPoint]:
    """
    Random nearly geodesic forks ``(z0, z1, z2, z2p)``, one per entry of ``delta_scale``.

    The exact fork ``(-e, 0), identity, (e, 0), (e, 0)`` along a random unit direction ``e`` has
    ``z0`` and ``z2`` moved by ``delta_scale`` horizontally and vertically, so the fork gap is of
    order ``delta_scale``. ``z2p`` is ``z2`` times a nearly horizontal step of the same size, so
    the tips usually differ mostly horizontally. The whole configuration is then rotated,
    dilated and translated at random; none of these changes the gap.
    """
    eps = np.atleast_1d(np.asarray(delta_scale, dtype=np.float64))
    count = len(eps)
    e = _complex_normal(rng, (count, dim))
    e /= vector_norm(e)[:, None]

    def tip(sign: float) -> HPoint:
        horizontal = sign * e + eps[:, None] * _complex_normal(rng, (count, dim))
        return HPoint(horizontal, eps * rng.standard_normal(count))

    z2 = tip(1.0)
    step = eps[:, None] * _complex_normal(rng, (count, dim))
    lean = 0.1 * vector_norm(step) ** 2 * rng.standard_normal(count)
    fork = [tip(-1.0), HPoint.identity(dim, (count,)), z2, product(z2, HPoint(step, lean))]

    phases = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=(count, dim)))
    lam = 10.0 ** rng.uniform(-1.0, 1.0, size=count)
    base = HPoint(_complex_normal(rng, (count, dim)), rng.standard_normal(count))

    def move(p: HPoint) -> HPoint:
        # Diagonal unitaries and dilations are automorphisms.
        moved = HPoint(lam[:, None] * phases * p.horizontal, lam * lam * p.center)
        return product(base, moved)

    z0, z1, z2, z2p = (move(p) for p in fork)
    return z0, z1, z2, z2p


class InequalityCheck(Registrable):
    """
    A pointwise inequality that :func:`run_suite` can sample. Subclasses say how many points
    one sample takes and evaluate a batch of samples.
    """

    default_implementation = "four-point"

    arity: int = NotImplemented
    tolerance: float = SUITE_TOLERANCE

    def sample(
        self, rng: np.random.Generator, count: int, dim: int, sampler: str
    ) -> List[Any]:
        return random_points(rng, count, dim, sampler, self.arity)

    def check(self, *args) -> MarginReport:
        raise NotImplementedError()

    @staticmethod
    def record(arg: Any, index: int) -> Dict[str, List[float]]:
        """A JSON friendly copy of the ``index``-th entry of a batch argument."""
        if isinstance(arg, HPoint):
            return {
                "horizontal_re": arg.horizontal[index].real.tolist(),
                "horizontal_im": arg.horizontal[index].imag.tolist(),
                "center": [float(arg.center[index])],
            }
        vector = np.asarray(arg)[index]
        return {"re": vector.real.tolist(), "im": vector.imag.tolist()}


@InequalityCheck.register("midpoint")
class MidpointCheck(InequalityCheck):
    arity = 3

    def check(self, *args):
        return check_midpoint(*args)


@InequalityCheck.register("shrink")
class ShrinkCheck(InequalityCheck):
    arity = 3

    def check(self, *args):
        return check_shrink(*args)


@InequalityCheck.register("four-point")
class FourPointCheck(InequalityCheck):
    arity = 4

    def check(self, *args):
        return check_four_point(*args)


@InequalityCheck.register("symplectic-projection")
class SymplecticProjectionCheck(InequalityCheck):
    arity = 2
    tolerance = SYMPLECTIC_TOLERANCE

    def sample(self, rng, count, dim, sampler):
        # Horizontal parts only; the center plays no role here.
        return [p.horizontal for p in random_points(rng, count, dim, sampler, self.arity)]

    def check(self, *args):
        return check_symplectic_projection(*args)


@dataclass
class SuiteRow:
    dim: int
    sampler: str
    count: int
    violations: int
    worst_relative_margin: float
    worst_inputs: Optional[List[Dict[str, List[float]]]] = None


@dataclass
class SuiteReport:
    checker: str
    tolerance: float
    seed: int
    rows: List[SuiteRow]

    @property
    def count(self) -> int:
        return sum(row.count for row in self.rows)

    @property
    def violations(self) -> int:
        return sum(row.violations for row in self.rows)

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass
class _Tally:
    count: int = 0
    violations: int = 0
    worst: float = math.inf
    witness: Optional[List[Dict[str, List[float]]]] = None

    def merge(self, other: "_Tally"):
        self.count += other.count
        self.violations += other.violations
        if other.worst < self.worst:
            self.worst, self.witness = other.worst, other.witness


def _relative(report: MarginReport) -> np.ndarray:
    margin = np.asarray(report.margin, dtype=np.float64)
    scale = np.asarray(report.scale, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(scale > 0, margin / np.where(scale > 0, scale, 1.0), margin)


def run_suite(
    checker: str,
    count: int = 100_000,
    dims: Sequence[int] = (1, 2, 8),
    seed: int = 1,
    threads: int = 1,
    samplers: Optional[Sequence[str]] = None,
) -> SuiteReport:
    """
    Evaluates the named checker on ``count`` random samples for every dimension and sampler.
    A sample violates the inequality when its margin is below ``-tolerance * scale``.

    Samples are drawn in chunks, each from its own stream derived from ``seed``, so the
    report does not depend on ``threads``.
    """
    check = InequalityCheck.by_name(checker)()
    if count < 1:
        raise ConfigurationError(f"count must be positive, got {count}")
    if samplers is None:
        samplers = PointSampler.list_available()
    for dim in dims:
        if dim < 1:
            raise ConfigurationError(f"dimensions must be at least 1, got {dim}")

    tasks = [
        (dim, sampler, lo, hi)
        for dim in dims
        for sampler in samplers
        for lo, hi in chunk_bounds(count, SUITE_CHUNK)
    ]
    generators = spawn_generators(seed, len(tasks))

    def run(index: int) -> _Tally:
        dim, sampler, lo, hi = tasks[index]
        args = check.sample(generators[index], hi - lo, dim, sampler)
        report = check.check(*args)
        relative = _relative(report)
        violations = np.logical_not(report.holds(check.tolerance))
        worst = int(np.argmin(relative))
        return _Tally(
            count=hi - lo,
            violations=int(np.count_nonzero(violations)),
            worst=float(relative[worst]),
            witness=[check.record(arg, worst) for arg in args],
        )

    tallies = chunked_map(run, len(tasks), threads=threads, progress=f"check {checker}")

    rows = []
    for dim in dims:
        for sampler in samplers:
            total = _Tally()
            for task, tally in zip(tasks, tallies):
                if task[0] == dim and task[1] == sampler:
                    total.merge(tally)
            if total.violations:
                logger.warning(
                    "%s: %d violations in dimension %d with the %s sampler",
                    checker,
                    total.violations,
                    dim,
                    sampler,
                )
            rows.append(
                SuiteRow(
                    dim=dim,
                    sampler=sampler,
                    count=total.count,
                    violations=total.violations,
                    worst_relative_margin=total.worst,
                    worst_inputs=total.witness,
                )
            )
    return SuiteReport(checker=checker, tolerance=check.tolerance, seed=seed, rows=rows)


@dataclass
class ForkRow:
    dim: int
    check: str
    count: int
    applicable: int
    violations: int
    worst_margin: float
    delta_min: float
    delta_max: float


@dataclass
class ForkSuiteReport:
    seed: int
    delta_range: Tuple[float, float]
    rows: List[ForkRow]

    @property
    def violations(self) -> int:
        return sum(row.violations for row in self.rows)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def fork_suite(
    count: int = 10_000,
    seed: int = 1,
    dims: Sequence[int] = (1, 2, 8),
    delta_range: Tuple[float, float] = FORK_DELTA_RANGE,
) -> ForkSuiteReport:
    """
    Runs :func:`check_fork_collapse` and :func:`check_small_angle` over synthetic forks whose
    perturbation scale is log-uniform in ``delta_range``. The small angle check sees each fork
    translated so that ``z1`` is the identity.
    """
    if count < 1:
        raise ConfigurationError(f"count must be positive, got {count}")
    low, high = delta_range
    if not 0 < low <= high:
        raise ConfigurationError(f"invalid fork gap range {delta_range}")
    generators = spawn_generators(seed, len(dims))
    rows = []
    for dim, rng in zip(dims, generators):
        scales = 10.0 ** rng.uniform(math.log10(low), math.log10(high), size=count)
        z0, z1, z2, z2p = synthetic_fork(rng, scales, dim)
        reports = [
            check_fork_collapse(z0, z1, z2, z2p),
            check_small_angle(difference(z1, z0), difference(z1, z2)),
        ]
        for report in reports:
            applicable = np.asarray(report.applicable)
            margin = np.asarray(report.margin)[applicable]
            deltas = np.asarray(report.margins["delta"])
            violations = int(np.count_nonzero(np.logical_not(report.holds())))
            rows.append(
                ForkRow(
                    dim=dim,
                    check=report.name,
                    count=count,
                    applicable=int(np.count_nonzero(applicable)),
                    violations=violations,
                    worst_margin=float(margin.min()) if len(margin) else math.inf,
                    delta_min=float(deltas.min()),
                    delta_max=float(deltas.max()),
                )
            )
            logger.info(
                "%s in dimension %d: %d applicable, %d violations",
                report.name,
                dim,
                rows[-1].applicable,
                violations,
            )
    return ForkSuiteReport(seed=seed, delta_range=(low, high), rows=rows)


@dataclass
class CollapseResult:
    """
    ``omega`` is the absolute value :math:`|\\omega|` of the returned ``pair``.
    ``bound`` is :math:`\\ell^2 / 4`, guaranteed only when ``hypotheses_hold``.
    """

    pair: Tuple[int, int]
    omega: float
    rounds: int
    ell: float
    n_vectors: int
    hypotheses_hold: bool
    bound: float
    within_bound: bool
    brute_force_min: Optional[float] = None
    brute_force_pair: Optional[Tuple[int, int]] = None
    brute_force_beats: Optional[bool] = None


def _hypotheses(n_vectors: int, max_norm: float, ell: float) -> bool:
    if ell <= 1:
        return False
    log_ell = math.log2(ell)
    if log_ell <= 0:
        return False
    return n_vectors >= 2 ** (ell / 2) / (16 * log_ell) and max_norm <= ell * math.sqrt(log_ell)


def brute_force_min_omega(vectors) -> Tuple[Tuple[int, int], float]:
    """The pair with the smallest ``|omega|``; ties go to the first pair in row order."""
    z = np.asarray(vectors, dtype=np.complex128)
    if z.ndim == 1:
        z = z[:, None]
    gram = np.abs((np.conj(z) @ z.T).imag)
    rows, cols = np.triu_indices(len(z), 1)
    best = int(np.argmin(gram[rows, cols]))
    return (int(rows[best]), int(cols[best])), float(gram[rows[best], cols[best]])


def symplectic_collapse_search(vectors, ell: float) -> CollapseResult:
    """
    Looks for two vectors with a small symplectic product by repeated bucketing.

    Each round takes the first active vector ``v``, compares it with every active vector,
    and projects the active set onto the complex line spanned by the residual of ``v``. The
    circle of directions in that line is cut into arcs of width ``max(log2 ell, 1)^-4`` by the
    angle relative to ``v``, and the most populated arc (the first one on ties) becomes the next
    active set, minus ``v``. Residuals are then taken in the orthogonal complement. The search
    stops when fewer than two vectors are left, when the residual of ``v`` vanishes, or after
    ``50 max(log2 ell, 1)^2`` rounds, and finally compares all pairs left.
    """
    z = np.asarray(vectors, dtype=np.complex128)
    if z.ndim == 1:
        z = z[:, None]
    if z.ndim != 2 or len(z) < 2:
        raise DegenerateConfigurationError("the collapse search needs at least two vectors")
    if not ell > 0:
        raise ConfigurationError(f"ell must be positive, got {ell}")

    n_vectors = len(z)
    norms = vector_norm(z)
    log_ell = max(math.log2(ell), 1.0)
    width = log_ell**-4
    n_buckets = int(math.ceil(2 * math.pi / width))
    max_rounds = int(math.ceil(50 * log_ell**2))
    tiny = 1e-12 * max(float(norms.max()), 1.0)

    best_pair, best = (0, 1), math.inf
    residual = z.copy()
    active = np.arange(n_vectors)
    rounds = 0
    while len(active) >= 2 and rounds < max_rounds:
        head, rest = active[0], active[1:]
        values = np.abs(symplectic(z[head], z[rest]))
        i = int(np.argmin(values))
        if values[i] < best:
            best_pair, best = (int(head), int(rest[i])), float(values[i])

        head_norm = vector_norm(residual[head])
        if head_norm <= tiny:
            break
        e = residual[head] / head_norm
        coefficients = residual[active] @ np.conj(e)
        angles = np.mod(np.angle(coefficients) - np.angle(coefficients[0]), 2 * math.pi)
        buckets = np.minimum((angles / width).astype(np.int64), n_buckets - 1)[1:]
        chosen = int(np.argmax(np.bincount(buckets, minlength=n_buckets)))
        residual[active] -= coefficients[:, None] * e[None, :]
        active = rest[buckets == chosen]
        rounds += 1

    if len(active) >= 2:
        (i, j), value = brute_force_min_omega(z[active])
        if value < best:
            best_pair, best = (int(active[i]), int(active[j])), value

    hypotheses_hold = _hypotheses(n_vectors, float(norms.max()), ell)
    bound = ell * ell / 4.0
    result = CollapseResult(
        pair=best_pair,
        omega=best,
        rounds=rounds,
        ell=ell,
        n_vectors=n_vectors,
        hypotheses_hold=hypotheses_hold,
        bound=bound,
        within_bound=best <= bound,
    )
    if n_vectors <= BRUTE_FORCE_LIMIT:
        pair, value = brute_force_min_omega(z)
        result.brute_force_min = value
        result.brute_force_pair = pair
        result.brute_force_beats = value < best
    logger.info(
        "collapse search: |omega| = %.6g for pair %s after %d rounds", best, best_pair, rounds
    )
    return result


def vectors_from_csv(path) -> np.ndarray:
    """
    Reads complex vectors from a CSV file with one vector per row, real and imaginary parts
    interleaved: ``re_1, im_1, re_2, im_2, ...``. A header line is optional.
    """
    from .format import CsvFormat

    table = CsvFormat().read(path)
    rows = [list(table.columns)] + [list(row) for row in table.rows]
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        rows = rows[1:]
    rows = [row for row in rows if row]
    if not rows:
        raise ConfigurationError(f"{path} holds no vectors")
    widths = {len(row) for row in rows}
    if len(widths) != 1 or widths.pop() % 2:
        raise ConfigurationError(
            f"{path}: every row needs the same even number of cells (interleaved re/im parts)"
        )
    try:
        values = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as e:
        raise ConfigurationError(f"{path}: {e}")
    return values[:, 0::2] + 1j * values[:, 1::2]
