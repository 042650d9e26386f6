"""
Markov convexity functionals.

For a Markov chain :math:`Z_t` and a map ``f`` of its states into a metric space, compare

.. math::

    \\sum_{k \\geq 0} \\sum_t \\frac{\\mathbb{E}\\, d(f(Z_t), f(\\tilde Z_t(t - 2^k)))^p}{2^{kp}}
    \\quad\\text{with}\\quad
    \\sum_t \\mathbb{E}\\, d(f(Z_t), f(Z_{t-1}))^p,

where :math:`\\tilde Z(s)` follows :math:`Z` up to time ``s`` and then evolves independently.
The map ``f`` is given as a :class:`~heislab.distortion.MetricSpace` on the chain's states.

Chains are frozen at their initial state for :math:`t \\leq 0` and stop moving after ``t_max``;
trajectories are stored for ``t = 0..t_max``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix, identity

from .common.exceptions import CapExceededError, ConfigurationError
from .common.util import chunk_bounds, chunked_map, spawn_generators
from .distortion import GraphMetric, HeisenbergMetric, MetricSpace
from .embedder import DEFAULT_M, angle_schedule, embed
from .laakso import SPAN, LaaksoGraph, build_graph

logger = logging.getLogger(__name__)

DEFAULT_COST_CAP = 10**8

MC_CHUNK = 4096

ROW_BLOCK = 2**20
"""Target number of distance evaluations per block in the exact evaluation."""


@dataclass
class ChainSpec:
    """
    A time-homogeneous chain on ``0..n_states - 1`` with transition matrix ``transition`` and
    initial law ``initial``, run over the horizon ``[t_min, t_max]``.
    """

    transition: csr_matrix
    initial: np.ndarray
    t_max: int
    t_min: int = -1
    tag: str = "custom"
    graph: Optional[LaaksoGraph] = field(default=None, repr=False)
    _tables: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        self.transition = csr_matrix(self.transition, dtype=np.float64)
        self.transition.eliminate_zeros()
        self.transition.sort_indices()
        self.initial = np.asarray(self.initial, dtype=np.float64)
        n = self.transition.shape[0]
        if self.transition.shape != (n, n):
            raise ConfigurationError(
                f"transition matrix must be square, got {self.transition.shape}"
            )
        if self.initial.shape != (n,):
            raise ConfigurationError(
                f"initial law has shape {self.initial.shape}, expected ({n},)"
            )
        if self.t_max < 1 or self.t_max <= self.t_min:
            raise ConfigurationError(f"empty horizon [{self.t_min}, {self.t_max}]")
        if self.transition.nnz and self.transition.data.min() < 0:
            raise ConfigurationError("transition probabilities must be nonnegative")
        sums = np.asarray(self.transition.sum(axis=1)).ravel()
        if not np.allclose(sums, 1.0, rtol=0, atol=1e-12):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ConfigurationError(
                f"transition probabilities of state {bad} sum to {sums[bad]}, not 1"
            )
        if self.initial.min() < 0 or not math.isclose(self.initial.sum(), 1.0, abs_tol=1e-12):
            raise ConfigurationError("initial law must be a probability vector")

    @classmethod
    def constant(cls, n_states: int = 1, t_max: int = 1, state: int = 0) -> "ChainSpec":
        """A chain that never moves."""
        initial = np.zeros(n_states)
        initial[state] = 1.0
        return cls(identity(n_states, format="csr"), initial, t_max, tag="constant")

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    def step_tables(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Successor states padded to a common width, and cumulative probabilities with the last
        real entry and the padding set to infinity.
        """
        if self._tables is None:
            csr = self.transition
            counts = np.diff(csr.indptr)
            width = max(int(counts.max()), 1)
            row = np.repeat(np.arange(self.n_states), counts)
            slot = np.arange(csr.nnz) - csr.indptr[row]
            successors = np.zeros((self.n_states, width), dtype=np.int64)
            probabilities = np.zeros((self.n_states, width))
            successors[row, slot] = csr.indices
            probabilities[row, slot] = csr.data
            cumulative = np.cumsum(probabilities, axis=1)
            last = np.arange(width)[None, :] >= (counts - 1)[:, None]
            cumulative[last] = np.inf
            self._tables = (successors, cumulative)
        return self._tables


def laakso_chain(g: LaaksoGraph) -> ChainSpec:
    """
    The walk from the source of :math:`G_m` that follows outgoing edges, choosing uniformly at
    the forks, and is absorbed at the sink at time :math:`6^m`.
    """
    if g.level == 0:
        raise ConfigurationError("the Laakso chain needs level >= 1")
    _, degree = g.out_table()
    u, v = g.edges[:, 0], g.edges[:, 1]
    rows = np.r_[u, g.sink]
    cols = np.r_[v, g.sink]
    data = np.r_[1.0 / degree[u], 1.0]
    transition = csr_matrix((data, (rows, cols)), shape=(g.n_vertices, g.n_vertices))
    transition.sort_indices()
    initial = np.zeros(g.n_vertices)
    initial[g.source] = 1.0
    return ChainSpec(transition, initial, t_max=g.diameter, tag="laakso", graph=g)


def _step(spec: ChainSpec, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    successors, cumulative = spec.step_tables()
    u = rng.random(len(states))
    choice = np.sum(cumulative[states] <= u[:, None], axis=1)
    return successors[states, choice]


def _as_generator(rng: Union[int, np.random.Generator]) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return spawn_generators(int(rng), 1)[0]


def sample_trajectories(
    spec: ChainSpec, count: int, rng: Union[int, np.random.Generator]
) -> np.ndarray:
    """``count`` trajectories ``Z_0..Z_{t_max}`` as an array of shape ``(count, t_max + 1)``."""
    rng = _as_generator(rng)
    out = np.empty((count, spec.t_max + 1), dtype=np.int64)
    out[:, 0] = rng.choice(spec.n_states, size=count, p=spec.initial)
    for t in range(1, spec.t_max + 1):
        out[:, t] = _step(spec, out[:, t - 1], rng)
    return out


def fork_chain(
    spec: ChainSpec, trajectory: np.ndarray, s: int, rng: Union[int, np.random.Generator]
) -> np.ndarray:
    """
    A trajectory equal to ``trajectory`` up to time ``s`` and resampled independently after it.
    Accepts one trajectory or a batch of them.
    """
    if s < spec.t_min:
        raise ConfigurationError(f"fork time {s} is before the horizon start {spec.t_min}")
    trajectory = np.asarray(trajectory)
    out = np.array(trajectory, dtype=np.int64, copy=True)
    if s >= spec.t_max:
        return out
    rng = _as_generator(rng)
    batch = out.reshape(-1, spec.t_max + 1)
    for t in range(max(s, 0) + 1, spec.t_max + 1):
        batch[:, t] = _step(spec, batch[:, t - 1], rng)
    return batch.reshape(trajectory.shape)


@dataclass
class MarkovEstimate:
    p: float
    lhs: float
    rhs: float
    ratio_pi: float
    mode: str
    terms: List[float]
    """The explicit ``k``-terms, ``k = 0..K - 1``."""
    tail: float
    """Closed form of the terms ``k >= K``, which all fork before time 0."""
    k_range: Tuple[int, int]
    samples: Optional[int] = None
    seed: Optional[int] = None
    stderr: Optional[float] = None
    rhs_stderr: Optional[float] = None


def _ratio(lhs: float, rhs: float, p: float) -> float:
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return (lhs / rhs) ** (1.0 / p)


def first_coalesced_k(t_max: int) -> int:
    """The first ``k`` with ``2**k > t_max``. From there on every fork happens before time 0."""
    k = 0
    while 2**k <= t_max:
        k += 1
    return k


def _tail_factor(K: int, p: float) -> float:
    return 2.0 ** (-K * p) / (1.0 - 2.0 ** (-p))


def _padded_rows(matrix: csr_matrix) -> Tuple[np.ndarray, np.ndarray]:
    matrix = csr_matrix(matrix)
    matrix.eliminate_zeros()
    counts = np.diff(matrix.indptr)
    width = max(int(counts.max()), 1)
    row = np.repeat(np.arange(matrix.shape[0]), counts)
    slot = np.arange(matrix.nnz) - matrix.indptr[row]
    index = np.zeros((matrix.shape[0], width), dtype=np.int64)
    weight = np.zeros((matrix.shape[0], width))
    index[row, slot] = matrix.indices
    weight[row, slot] = matrix.data
    return index, weight


def _spread(
    metric: MetricSpace, index: np.ndarray, weight: np.ndarray, p: float
) -> np.ndarray:
    """For each row ``q`` of a padded sparse matrix, :math:`\\sum_{a,b} q_a q_b d(a, b)^p`."""
    width = index.shape[1]
    out = np.zeros(len(index))
    block = max(1, ROW_BLOCK // (width * width))
    for lo, hi in chunk_bounds(len(index), block):
        idx = index[lo:hi]
        w = weight[lo:hi]
        d = metric.paired(idx[:, :, None], idx[:, None, :]) ** p
        out[lo:hi] = np.einsum("ra,rb,rab->r", w, w, d)
    return out


def _exact_cost(spec: ChainSpec, K: int) -> int:
    width = int(np.diff(spec.transition.indptr).max())
    widest = 1
    power = spec.transition
    for _ in range(K):
        power = power @ power
        widest = max(widest, int(np.diff(power.indptr).max()))
    return (spec.n_states * (K + 1) + spec.t_max) * widest * widest + width


def _exact(spec: ChainSpec, metric: MetricSpace, p: float, cost_cap: int) -> MarkovEstimate:
    t_max = spec.t_max
    K = first_coalesced_k(t_max)
    cost = _exact_cost(spec, K)
    if cost > cost_cap:
        raise CapExceededError(
            f"exact evaluation needs about {cost} distance evaluations, above the cap of "
            f"{cost_cap}; use Monte Carlo"
        )

    # Occupation sums: cumulative[s] = sum of the laws of Z_0..Z_s, kept where needed.
    needed = {t_max - 1} | {t_max - 2**k for k in range(K)}
    occupation: Dict[int, np.ndarray] = {}
    law = spec.initial.copy()
    running = np.zeros(spec.n_states)
    transposed = spec.transition.T.tocsr()
    for s in range(t_max):
        running += law
        if s in needed:
            occupation[s] = running.copy()
        law = transposed @ law

    # Spread of two independent continuations from the initial law, for t = 1..t_max.
    support = np.flatnonzero(spec.initial)
    rows = csr_matrix(
        (np.ones(len(support)), (np.arange(len(support)), support)),
        shape=(len(support), spec.n_states),
    )
    independent = np.zeros(t_max + 1)
    for t in range(1, t_max + 1):
        rows = rows @ spec.transition
        index, weight = _padded_rows(rows)
        independent[t] = float(spec.initial[support] @ _spread(metric, index, weight, p))
    prefix = np.cumsum(independent)

    terms = []
    power = spec.transition
    for k in range(K):
        h = 2**k
        index, weight = _padded_rows(power)
        spread = _spread(metric, index, weight, p)
        forked = float(occupation[t_max - h] @ spread)
        early = float(prefix[min(h - 1, t_max)])
        terms.append((forked + early) / 2.0 ** (k * p))
        power = power @ power
    tail = float(prefix[t_max]) * _tail_factor(K, p)

    moves = spec.transition.tocoo()
    increments = np.zeros(spec.n_states)
    np.add.at(increments, moves.row, moves.data * metric.paired(moves.row, moves.col) ** p)
    rhs = float(occupation[t_max - 1] @ increments)
    lhs = float(sum(terms) + tail)
    return MarkovEstimate(
        p=p,
        lhs=lhs,
        rhs=rhs,
        ratio_pi=_ratio(lhs, rhs, p),
        mode="exact",
        terms=terms,
        tail=tail,
        k_range=(0, K),
    )


def _montecarlo(
    spec: ChainSpec, metric: MetricSpace, p: float, samples: int, seed: int, threads: int
) -> MarkovEstimate:
    t_max = spec.t_max
    K = first_coalesced_k(t_max)
    tail_factor = _tail_factor(K, p)
    bounds = chunk_bounds(samples, MC_CHUNK)
    generators = spawn_generators(seed, len(bounds))

    def run(index: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        lo, hi = bounds[index]
        rng = generators[index]
        count = hi - lo
        z = sample_trajectories(spec, count, rng)
        rhs = np.sum(metric.paired(z[:, 1:], z[:, :-1]) ** p, axis=1)
        everyone = np.arange(count)
        per_k = np.zeros((count, K + 1))
        for k in range(K + 1):
            h = 2**k
            t = rng.integers(1, t_max + 1, size=count)
            start = np.maximum(t - h, 0) if k < K else np.zeros(count, dtype=np.int64)
            steps = t - start
            fork = z[everyone, start]
            for r in range(1, int(steps.max()) + 1):
                active = steps >= r
                fork[active] = _step(spec, fork[active], rng)
            d = metric.paired(z[everyone, t], fork) ** p
            weight = 2.0 ** (-k * p) if k < K else tail_factor
            per_k[:, k] = t_max * d * weight
        return per_k, rhs, per_k.sum(axis=1)

    parts = chunked_map(run, len(bounds), threads=threads, progress="markov: chunks")
    per_k = np.concatenate([part[0] for part in parts])
    rhs_samples = np.concatenate([part[1] for part in parts])
    lhs_samples = np.concatenate([part[2] for part in parts])
    lhs = float(lhs_samples.mean())
    rhs = float(rhs_samples.mean())
    root = math.sqrt(samples)
    return MarkovEstimate(
        p=p,
        lhs=lhs,
        rhs=rhs,
        ratio_pi=_ratio(lhs, rhs, p),
        mode="montecarlo",
        terms=per_k[:, :K].mean(axis=0).tolist(),
        tail=float(per_k[:, K].mean()),
        k_range=(0, K),
        samples=samples,
        seed=seed,
        stderr=float(lhs_samples.std(ddof=1) / root) if samples > 1 else math.inf,
        rhs_stderr=float(rhs_samples.std(ddof=1) / root) if samples > 1 else math.inf,
    )


def functional(
    spec: ChainSpec,
    metric: MetricSpace,
    p: float,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 1,
    threads: int = 1,
    cost_cap: int = DEFAULT_COST_CAP,
) -> MarkovEstimate:
    """
    Both sides of the Markov convexity inequality for the chain ``spec`` mapped by ``metric``.
    ``mode="exact"`` propagates laws through powers of the transition matrix;
    ``mode="montecarlo"`` averages ``samples`` coupled trajectory pairs.
    """
    if not p >= 1:
        raise ConfigurationError(f"p must be at least 1, got {p}")
    if len(metric) != spec.n_states:
        raise ConfigurationError(
            f"the metric has {len(metric)} points but the chain has {spec.n_states} states"
        )
    if mode == "exact":
        return _exact(spec, metric, p, cost_cap)
    if mode == "montecarlo":
        if samples < 2:
            raise ConfigurationError(f"Monte Carlo needs at least 2 samples, got {samples}")
        return _montecarlo(spec, metric, p, samples, seed, threads)
    raise ConfigurationError(f"unknown mode '{mode}', expected 'exact' or 'montecarlo'")


def window_height(k: int) -> int:
    """:math:`h = \\lceil k \\log 2 / \\log 6 \\rceil`, computed exactly."""
    h = 0
    while SPAN**h < 2**k:
        h += 1
    return h


def drift_windows(m: int, k: int) -> np.ndarray:
    """
    The times :math:`6^{h+1} i + 6^h + 6^{h-1} + j` for ``j = 0..6^{h-1}`` and
    ``i = 1..6^{m-h-1} - 1``, restricted to ``[0, 6^m)``.
    """
    if k < 1:
        raise ConfigurationError(f"drift windows need k >= 1, got {k}")
    h = window_height(k)
    if m - h - 1 < 0:
        return np.zeros(0, dtype=np.int64)
    low = SPAN ** (h - 1)
    times = [
        SPAN ** (h + 1) * i + SPAN**h + low + np.arange(low + 1)
        for i in range(1, SPAN ** (m - h - 1))
    ]
    if not times:
        return np.zeros(0, dtype=np.int64)
    out = np.unique(np.concatenate(times))
    return out[out < SPAN**m]


def restricted_drift_sum(spec: ChainSpec, metric: MetricSpace, p: float, k: int) -> float:
    """
    The ``k``-term of the functional with ``t`` restricted to :func:`drift_windows`. Computed
    exactly; it never exceeds the unrestricted ``k``-term.
    """
    if spec.tag != "laakso" or spec.graph is None:
        raise ConfigurationError("restricted drift sums are defined for Laakso chains only")
    if not p >= 1:
        raise ConfigurationError(f"p must be at least 1, got {p}")
    times = drift_windows(spec.graph.level, k)
    times = times[(times >= 1) & (times <= spec.t_max)]
    if len(times) == 0:
        return 0.0
    h = 2**k
    late = times[times >= h]
    early = times[times < h]

    starts = set((late - h).tolist())
    weight = np.zeros(spec.n_states)
    law = spec.initial.copy()
    transposed = spec.transition.T.tocsr()
    for s in range(int(max(starts)) + 1 if starts else 0):
        if s in starts:
            weight += law
        law = transposed @ law

    total = 0.0
    if len(late):
        power = spec.transition
        for _ in range(k):
            power = power @ power
        index, pad = _padded_rows(power)
        total += float(weight @ _spread(metric, index, pad, p))
    if len(early):
        support = np.flatnonzero(spec.initial)
        rows = csr_matrix(
            (np.ones(len(support)), (np.arange(len(support)), support)),
            shape=(len(support), spec.n_states),
        )
        wanted = set(early.tolist())
        for t in range(1, int(early.max()) + 1):
            rows = rows @ spec.transition
            if t in wanted:
                index, pad = _padded_rows(rows)
                total += float(spec.initial[support] @ _spread(metric, index, pad, p))
    return total / 2.0 ** (k * p)


@dataclass
class SweepRow:
    level: int
    p: float
    mode: str
    lhs: float
    rhs: float
    ratio_pi: float
    stderr: Optional[float] = None


def chain_metric(g: LaaksoGraph, target: str, M: float = DEFAULT_M) -> MetricSpace:
    """The states of the Laakso chain mapped into ``G_m`` itself or by the double-diamond map."""
    if target == "graph":
        return GraphMetric(g)
    if target == "heisenberg":
        return HeisenbergMetric(embed(g, angle_schedule(M, g.level)).points())
    raise ConfigurationError(f"unknown target '{target}', expected 'graph' or 'heisenberg'")


def sweep(
    levels: Sequence[int],
    ps: Sequence[float],
    M: float = DEFAULT_M,
    target: str = "heisenberg",
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 1,
    threads: int = 1,
    cost_cap: int = DEFAULT_COST_CAP,
    level_cap: int = 6,
    motif: str = "laakso",
) -> List[SweepRow]:
    """The functional over levels and exponents, ordered by level and then by ``p``."""
    rows = []
    for m in levels:
        g = build_graph(m, motif=motif, level_cap=level_cap)
        spec = laakso_chain(g)
        metric = chain_metric(g, target, M)
        for p in ps:
            estimate = functional(
                spec,
                metric,
                p,
                mode=mode,
                samples=samples,
                seed=seed,
                threads=threads,
                cost_cap=cost_cap,
            )
            logger.info("level %d, p=%g: ratio %.6g", m, p, estimate.ratio_pi)
            rows.append(
                SweepRow(m, p, mode, estimate.lhs, estimate.rhs, estimate.ratio_pi, estimate.stderr)
            )
    return rows
