"""Uniform-mixing checks and searches, product closure tooling, and average-mixing bounds.

Non-attainment results from the scanner are numerical: "the distance to the
target exceeds the tolerance everywhere on a finite window", never a proof.
Reports say so explicitly in their note field.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graphs import WeightedGraph, cartesian_product
from .spectral import SpectralDecomposition, decompose
from .walk import (
    Distribution,
    as_distribution,
    average_distribution,
    distributions_at_times,
    evolve,
    instantaneous_distribution,
    sup_distance,
)

DEFAULT_SCAN_T_MAX = 200.0
DEFAULT_SCAN_STEP = 1e-3
DEFAULT_SCAN_TOLERANCE = 1e-6
DEFAULT_REFINE_WIDTH = 1e-10
TIME_MATCH_TOL = 1e-9

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MixingTimeSet:
    """Times at which a walk attains a target distribution.

    Closed-form families carry arithmetic progressions (offset, period),
    meaning offset + k * period for every integer k >= 0; scans carry finite
    refined lists. Both may be present.
    """

    progressions: tuple[tuple[float, float], ...] = ()
    times: tuple[float, ...] = ()

    def sample(self, t_max: float) -> np.ndarray:
        """All represented times in [0, t_max], sorted."""
        values = [t for t in self.times if t <= t_max]
        for offset, period in self.progressions:
            k = 0
            while offset + k * period <= t_max:
                values.append(offset + k * period)
                k += 1
        values.sort()
        deduped: list[float] = []
        for t in values:
            if not deduped or t - deduped[-1] > TIME_MATCH_TOL:
                deduped.append(t)
        return np.array(deduped)

    def contains(self, t: float, tol: float = TIME_MATCH_TOL) -> bool:
        for known in self.times:
            if abs(t - known) <= tol:
                return True
        for offset, period in self.progressions:
            k = round((t - offset) / period)
            if k >= 0 and abs(offset + k * period - t) <= tol:
                return True
        return False


def intersect_mixing_times(a: MixingTimeSet, b: MixingTimeSet, t_max: float, tol: float = TIME_MATCH_TOL) -> list[float]:
    """Times in [0, t_max] present in both sets, within an absolute tolerance."""
    return [float(t) for t in a.sample(t_max) if b.contains(float(t), tol)]


@dataclass(frozen=True)
class MixingReport:
    """Outcome of a mixing check against a target distribution."""

    kind: str
    start: int
    target: Distribution
    best_time: float | None
    best_distance: float | None
    scan_window: tuple[float, float] | None
    feasible: bool
    tolerance: float
    times: MixingTimeSet | None = None
    note: str = ""


def _golden_minimize(f, a: float, b: float, width: float) -> tuple[float, float]:
    """Golden-section minimum of f on [a, b], refined to the given bracket width.

    Returns the best point actually evaluated, so the result never exceeds
    any sampled value."""
    best_x, best_f = a, math.inf

    def probe(x: float) -> float:
        nonlocal best_x, best_f
        fx = f(x)
        if fx < best_f:
            best_x, best_f = x, fx
        return fx

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = probe(c), probe(d)
    while b - a > width:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = probe(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = probe(d)
    return best_x, best_f


def _grid_distances(
    d: SpectralDecomposition, start: int, times: np.ndarray, target: np.ndarray, threads: int | None
) -> np.ndarray:
    def block(tt: np.ndarray) -> np.ndarray:
        rows = distributions_at_times(d, start, tt)
        return np.max(np.abs(rows - target), axis=1)

    if threads and threads > 1 and times.size > 10_000:
        chunks = np.array_split(times, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return np.concatenate(list(pool.map(block, chunks)))
    return block(times)


def target_mixing_scan(
    g: WeightedGraph,
    start: int,
    target,
    t_max: float = DEFAULT_SCAN_T_MAX,
    step: float = DEFAULT_SCAN_STEP,
    tolerance: float = DEFAULT_SCAN_TOLERANCE,
    *,
    decomposition: SpectralDecomposition | None = None,
    threads: int | None = None,
    refine_width: float = DEFAULT_REFINE_WIDTH,
) -> MixingReport:
    """Scan the sup-norm distance to a target over a time grid, with
    golden-section refinement around every local grid minimum.

    When times within tolerance exist, ``best_time`` is the earliest such time
    and ``times`` collects all of them; ``best_distance`` is always the global
    refined minimum.
    """
    if not (t_max > 0.0 and step > 0.0 and tolerance > 0.0):
        raise ValueError("t_max, step and tolerance must all be positive")
    d = decomposition if decomposition is not None else decompose(g)
    target = as_distribution(target)
    if len(target) != d.n:
        raise ValueError(f"target has {len(target)} entries for a graph on {d.n} vertices")

    count = int(math.floor(t_max / step + 1e-9)) + 1
    times = step * np.arange(count)
    grid = _grid_distances(d, start, times, target.probs, threads)

    def distance_at(t: float) -> float:
        state = evolve(g, start, float(t), decomposition=d)
        return sup_distance(state.probabilities(), target.probs)

    minima: list[int] = []
    for i in range(count):
        left_ok = i == 0 or grid[i] <= grid[i - 1]
        right_ok = i == count - 1 or grid[i] <= grid[i + 1]
        if left_ok and right_ok:
            minima.append(i)

    refined: list[tuple[float, float]] = []
    for i in minima:
        lo = times[max(i - 1, 0)]
        hi = times[min(i + 1, count - 1)]
        if hi - lo <= refine_width:
            refined.append((float(times[i]), float(grid[i])))
            continue
        x, fx = _golden_minimize(distance_at, float(lo), float(hi), refine_width)
        if grid[i] < fx:
            x, fx = float(times[i]), float(grid[i])
        refined.append((x, fx))

    best_distance = min(fx for _, fx in refined)
    hits = sorted(x for x, fx in refined if fx <= tolerance)
    if hits:
        merged = [hits[0]]
        for t in hits[1:]:
            if t - merged[-1] > step / 2.0:
                merged.append(t)
        return MixingReport(
            kind="instantaneous",
            start=start,
            target=target,
            best_time=merged[0],
            best_distance=best_distance,
            scan_window=(t_max, step),
            feasible=True,
            tolerance=tolerance,
            times=MixingTimeSet(times=tuple(merged)),
        )
    best_time = min(refined, key=lambda pair: pair[1])[0]
    return MixingReport(
        kind="instantaneous",
        start=start,
        target=target,
        best_time=best_time,
        best_distance=best_distance,
        scan_window=(t_max, step),
        feasible=False,
        tolerance=tolerance,
        note=(
            "no scanned time reaches the target within tolerance; "
            "numerical evidence over a finite window, not a proof of non-attainment"
        ),
    )


def uniform_mixing_scan(
    g: WeightedGraph,
    start: int,
    t_max: float = DEFAULT_SCAN_T_MAX,
    step: float = DEFAULT_SCAN_STEP,
    tolerance: float = DEFAULT_SCAN_TOLERANCE,
    **kwargs,
) -> MixingReport:
    """``target_mixing_scan`` against the uniform distribution."""
    return target_mixing_scan(g, start, Distribution.uniform(g.n), t_max, step, tolerance, **kwargs)


@dataclass(frozen=True)
class CompleteGraphUniformMixing:
    """Feasibility and closed-form uniform mixing times for the unweighted complete graph.

    Uniform mixing of K_n requires sin^2(t n / (2 (n - 1))) = n / 4, which has
    solutions only for n <= 4."""

    n: int
    feasible: bool
    required_sin_squared: float
    times: MixingTimeSet = field(default_factory=MixingTimeSet)


def complete_graph_uniform_condition(n: int) -> CompleteGraphUniformMixing:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"need integer n >= 2, got {n!r}")
    n = int(n)
    required = n / 4.0
    if required > 1.0:
        return CompleteGraphUniformMixing(n, False, required)
    base = math.asin(math.sqrt(required))
    stretch = 2.0 * (n - 1) / n  # t = stretch * x for sin^2(x) = n/4
    period = math.pi * stretch
    offsets = sorted({base * stretch, (math.pi - base) * stretch})
    if len(offsets) == 2 and offsets[1] - offsets[0] <= TIME_MATCH_TOL:
        offsets = offsets[:1]
    progressions = tuple((off, period) for off in offsets)
    return CompleteGraphUniformMixing(n, True, required, MixingTimeSet(progressions=progressions))


def hypercube_mixing_times(n: int, edge_weight: float = 1.0) -> MixingTimeSet:
    """Uniform mixing times of the dimension-n hypercube whose edges all carry
    ``edge_weight``.

    The walk factorizes over dimensions, so the times depend only on the
    coupling: (2k+1) pi / (4 w). With w = 1 that is (2k+1) pi/4 for every n;
    the often-quoted (2k+1) n pi / 4 corresponds to w = 1/n.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"need integer n >= 1, got {n!r}")
    if not edge_weight > 0.0:
        raise ValueError(f"edge weight must be positive, got {edge_weight}")
    quarter = math.pi / (4.0 * edge_weight)
    return MixingTimeSet(progressions=((quarter, 2.0 * quarter),))


def product_uniform_mixing(
    g: WeightedGraph,
    h: WeightedGraph,
    g_times,
    h_times,
    start_g: int = 0,
    start_h: int = 0,
    tolerance: float = 1e-9,
    t_max: float = 50.0,
    time_tol: float = TIME_MATCH_TOL,
) -> MixingReport:
    """Check uniform mixing of the Cartesian product at common factor mixing times.

    ``g_times`` / ``h_times`` are MixingTimeSets (or MixingReports carrying
    one). Candidate common times are verified by direct simulation on the
    product. An empty intersection means not-established, not a disproof.
    """
    g_set = g_times.times if isinstance(g_times, MixingReport) else g_times
    h_set = h_times.times if isinstance(h_times, MixingReport) else h_times
    if not isinstance(g_set, MixingTimeSet) or not isinstance(h_set, MixingTimeSet):
        raise ValueError("factor mixing times are missing (infeasible factor report?)")

    product = cartesian_product(g, h)
    start = start_g * h.n + start_h
    uniform = Distribution.uniform(product.n)
    common = intersect_mixing_times(g_set, h_set, t_max, time_tol)
    if not common:
        return MixingReport(
            kind="instantaneous",
            start=start,
            target=uniform,
            best_time=None,
            best_distance=None,
            scan_window=None,
            feasible=False,
            tolerance=tolerance,
            note="no common factor mixing times in the window; not established (not a disproof)",
        )

    d = decompose(product)
    verified: list[float] = []
    best_time, best_distance = None, math.inf
    for t in common:
        dist = sup_distance(instantaneous_distribution(evolve(product, start, t, decomposition=d)), uniform)
        if dist < best_distance:
            best_time, best_distance = t, dist
        if dist <= tolerance:
            verified.append(t)
    if verified:
        return MixingReport(
            kind="instantaneous",
            start=start,
            target=uniform,
            best_time=verified[0],
            best_distance=best_distance,
            scan_window=None,
            feasible=True,
            tolerance=tolerance,
            times=MixingTimeSet(times=tuple(verified)),
        )
    return MixingReport(
        kind="instantaneous",
        start=start,
        target=uniform,
        best_time=best_time,
        best_distance=best_distance,
        scan_window=None,
        feasible=False,
        tolerance=tolerance,
        note="common factor times exist but the product is not uniform there within tolerance",
    )


@dataclass(frozen=True)
class AverageMixingBound:
    """Spectral-type lower bound on the start vertex's time-averaged probability.

    For every start vertex, the time-averaged probability of the start itself
    is at least 1/tau (tau = number of distinct eigenvalues). When 1/tau
    exceeds c/n, no start can be averaged down to O(1/n) mass, so
    almost-uniform average mixing is excluded for the supplied constant c.
    """

    n: int
    tau: int
    lower_bound: float
    start_averages: np.ndarray  # time-averaged start probability, per start vertex
    c: float
    almost_uniform_excluded: bool

    @property
    def max_start_average(self) -> float:
        return float(np.max(self.start_averages))

    @property
    def min_start_average(self) -> float:
        return float(np.min(self.start_averages))


def average_mixing_bound(
    g: WeightedGraph,
    c: float = 1.0,
    tolerance: float = 1e-9,
    decomposition: SpectralDecomposition | None = None,
) -> AverageMixingBound:
    """Compute tau, the 1/tau bound, and every start vertex's average self-probability."""
    d = decomposition if decomposition is not None else decompose(g)
    v = d.eigenvectors
    averages = np.zeros(d.n)
    for group in d.groups:
        diag = np.sum(v[:, list(group)] ** 2, axis=1)  # diagonal of the group projector
        averages += diag * diag
    tau = d.spectral_type
    bound = 1.0 / tau
    if float(np.min(averages)) < bound - tolerance:
        raise RuntimeError(
            f"average start probability {float(np.min(averages)):.12f} fell below 1/tau = {bound:.12f}"
        )
    averages.setflags(write=False)
    excluded = bound > c / g.n
    return AverageMixingBound(g.n, tau, bound, averages, float(c), excluded)


@dataclass(frozen=True)
class AverageTargetVerdict:
    """Reachability of a target as a time-averaged distribution from a given start.

    ``excluded`` is True when the target's start-vertex mass lies below the
    1/tau floor, which no weight assignment can evade; False only means not
    excluded by this criterion."""

    excluded: bool
    start_probability: float
    bound: float
    tau: int


def average_universal_verdict(
    g: WeightedGraph,
    target,
    start: int,
    tolerance: float = 1e-9,
    decomposition: SpectralDecomposition | None = None,
) -> AverageTargetVerdict:
    """Decide whether a target average distribution is excluded by the 1/tau floor."""
    d = decomposition if decomposition is not None else decompose(g)
    target = as_distribution(target)
    if len(target) != d.n:
        raise ValueError(f"target has {len(target)} entries for a graph on {d.n} vertices")
    if not isinstance(start, (int, np.integer)) or not 0 <= start < d.n:
        raise ValueError(f"start vertex {start!r} out of range")
    tau = d.spectral_type
    bound = 1.0 / tau
    start_probability = float(target.probs[int(start)])
    return AverageTargetVerdict(start_probability < bound - tolerance, start_probability, bound, tau)
