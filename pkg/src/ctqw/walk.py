"""Forward evolution of the continuous-time quantum walk and its distributions.

The walk on a weighted graph with adjacency matrix A evolves a vertex basis
state as psi(t) = exp(-i t A) e_start, evaluated exactly through the spectral
decomposition. Instantaneous probabilities are |psi_j(t)|^2; the long-run time
average has the closed form

    avg_j = sum over distinct eigenvalues of (P_lambda[j, start])^2

with P_lambda the spectral projectors. A trapezoidal time average exists as an
independent numerical cross-check of that formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import WeightedGraph
from .spectral import SpectralDecomposition, decompose

_NORM_TOL = 1e-12
_NEGATIVE_PROB_TOL = 1e-14
_SUM_TOL = 1e-10


@dataclass(frozen=True)
class WalkState:
    """Complex amplitudes over the vertices at one time instant (unit norm)."""

    amplitudes: np.ndarray
    time: float

    def __post_init__(self) -> None:
        amp = np.array(self.amplitudes, dtype=complex)
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"walk state norm {norm} deviates from 1 by more than {_NORM_TOL}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real**2 + self.amplitudes.imag**2


@dataclass(frozen=True)
class Distribution:
    """Probabilities over the vertices: entries >= 0 (tiny negatives clamped), sum 1."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("distribution must be a non-empty 1-d vector")
        if probs.min(initial=0.0) < -_NEGATIVE_PROB_TOL:
            raise ValueError(f"negative probability {probs.min()} below clamp tolerance")
        np.clip(probs, 0.0, None, out=probs)
        total = float(probs.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1 within {_SUM_TOL}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, idx):
        return self.probs[idx]

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point(cls, n: int, vertex: int) -> "Distribution":
        probs = np.zeros(n)
        probs[vertex] = 1.0
        return cls(probs)


def as_distribution(values) -> Distribution:
    """Coerce an array-like (or pass through a Distribution) with validation."""
    if isinstance(values, Distribution):
        return values
    return Distribution(np.asarray(values, dtype=float))


def sup_distance(a, b) -> float:
    """Sup-norm distance between two probability vectors."""
    pa = a.probs if isinstance(a, Distribution) else np.asarray(a, dtype=float)
    pb = b.probs if isinstance(b, Distribution) else np.asarray(b, dtype=float)
    if pa.shape != pb.shape:
        raise ValueError(f"shape mismatch {pa.shape} vs {pb.shape}")
    return float(np.max(np.abs(pa - pb)))


def _check_start(n: int, start: int) -> int:
    if not isinstance(start, (int, np.integer)) or not 0 <= start < n:
        raise ValueError(f"start vertex {start!r} out of range for {n} vertices")
    return int(start)


def propagate(decomposition: SpectralDecomposition, amplitudes: np.ndarray, t: float) -> np.ndarray:
    """Apply exp(-i t A) to an amplitude vector through the decomposition of A."""
    v = decomposition.eigenvectors
    coeff = v.T @ np.asarray(amplitudes, dtype=complex)
    phases = np.exp(-1j * t * decomposition.eigenvalues)
    return v @ (phases * coeff)


def evolve(
    g: WeightedGraph,
    start: int,
    t: float,
    decomposition: SpectralDecomposition | None = None,
) -> WalkState:
    """State of the walk at time t, started from a vertex basis state.

    Negative t is allowed (the evolution is reversible).
    """
    start = _check_start(g.n, start)
    d = decomposition if decomposition is not None else decompose(g)
    v = d.eigenvectors
    phases = np.exp(-1j * float(t) * d.eigenvalues)
    amplitudes = v @ (phases * v[start, :])
    return WalkState(amplitudes, float(t))


def instantaneous_distribution(state: WalkState) -> Distribution:
    """Measurement probabilities |psi_j|^2 of a walk state."""
    return Distribution(state.probabilities())


def distributions_at_times(
    decomposition: SpectralDecomposition,
    start: int,
    times: np.ndarray,
) -> np.ndarray:
    """Probability rows for a batch of times, shape (len(times), n). Chunked internally."""
    start = _check_start(decomposition.n, start)
    times = np.asarray(times, dtype=float).ravel()
    v = decomposition.eigenvectors
    coeff = v[start, :]
    out = np.empty((times.size, decomposition.n))
    chunk = max(1, 2_000_000 // max(1, decomposition.n))
    for lo in range(0, times.size, chunk):
        tt = times[lo : lo + chunk]
        amps = (np.exp(-1j * np.outer(tt, decomposition.eigenvalues)) * coeff) @ v.T
        out[lo : lo + tt.size] = amps.real**2 + amps.imag**2
    return out


def average_distribution(
    g: WeightedGraph,
    start: int,
    decomposition: SpectralDecomposition | None = None,
) -> Distribution:
    """Long-run time average of the walk's distribution, via spectral projectors.

    The grouping tolerance of the decomposition decides which eigenvalues
    count as equal; pass a custom decomposition to control it.
    """
    d = decomposition if decomposition is not None else decompose(g)
    start = _check_start(d.n, start)
    v = d.eigenvectors
    probs = np.zeros(d.n)
    for group in d.groups:
        idx = list(group)
        w = v[:, idx] @ v[start, idx]
        probs += w * w
    return Distribution(probs)


def numerical_time_average(
    g: WeightedGraph,
    start: int,
    t_final: float,
    steps: int,
    decomposition: SpectralDecomposition | None = None,
) -> Distribution:
    """Trapezoidal approximation of (1/T) * integral of p(t) over [0, T].

    Independent numerical oracle for ``average_distribution``; agreement is
    O(1/T) once the step resolves the fastest phase difference.
    """
    if not t_final > 0.0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    if not isinstance(steps, (int, np.integer)) or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps!r}")
    d = decomposition if decomposition is not None else decompose(g)
    start = _check_start(d.n, start)
    times = np.linspace(0.0, float(t_final), int(steps) + 1)
    weights = np.full(times.size, 1.0 / steps)
    weights[0] = weights[-1] = 0.5 / steps
    acc = np.zeros(d.n)
    chunk = max(1, 2_000_000 // max(1, d.n))
    for lo in range(0, times.size, chunk):
        rows = distributions_at_times(d, start, times[lo : lo + chunk])
        acc += weights[lo : lo + rows.shape[0]] @ rows
    return Distribution(acc)


def trajectory(
    g: WeightedGraph,
    start: int,
    t_max: float,
    step: float,
    decomposition: SpectralDecomposition | None = None,
) -> list[tuple[float, Distribution]]:
    """Distributions on the grid t = 0, step, 2*step, ... <= t_max."""
    if not t_max > 0.0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if not step > 0.0:
        raise ValueError(f"step must be positive, got {step}")
    d = decomposition if decomposition is not None else decompose(g)
    start = _check_start(d.n, start)
    count = int(math.floor(t_max / step + 1e-9)) + 1
    times = step * np.arange(count)
    rows = distributions_at_times(d, start, times)
    return [(float(t), Distribution(row)) for t, row in zip(times, rows)]
