"""Closed-form inverse mixing design for 3-paths, stars, and complete multipartite graphs.

Given a target probability distribution, each solver returns edge weights and
a time at which the walk from the chosen start vertex hits the target exactly.
Every solution is verified by forward simulation before it is returned; a
residual above the tolerance is an internal error, never a silent result.

The 3-path with weights (1, a) started at an end vertex has

    p_end    = (1 - 2 G)^2
    p_middle = 4 G (1 - G D^2)          G = sin^2(D t / 2) / D^2
    p_far    = a^2 (2 G)^2              D = sqrt(1 + a^2)

so choosing a = sqrt(p_far) / (1 - sqrt(p_end)) and 2 G = 1 - sqrt(p_end)
(principal branch) meets any target triple. Started at the middle vertex with
weights (sqrt(p_left), sqrt(p_right)) the walk gives p_middle = cos^2(D t)
with D = sqrt(p_left + p_right), solved by sin(D t) = D.

Stars and complete multipartite graphs reduce to the 3-path by collapsing
symmetric vertex groups onto unit cell vectors; amplitudes inside a cell stay
proportional to the cell vector coefficients, which lets target mass be
distributed within a cell by choosing weights proportional to sqrt(target).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import WeightedGraph, multipartite_cells
from .walk import Distribution, as_distribution, evolve, instantaneous_distribution, sup_distance

RESIDUAL_TOL = 1e-9
_CELL_ORTHONORMALITY_TOL = 1e-10


class SolverVerificationError(RuntimeError):
    """A closed-form solution failed its simulation self-check (internal error)."""


class InfeasibleTargetError(ValueError):
    """No weight assignment on the requested family can reach the target."""


@dataclass(frozen=True)
class MixingSolution:
    """Edge weights plus a time at which the walk hits the target, with the
    sup-norm residual measured by forward simulation."""

    graph: WeightedGraph
    start: int
    t: float
    residual: float


@dataclass(frozen=True)
class CollapsedSystem:
    """A walk reduced onto orthonormal cell vectors.

    ``reduced_hamiltonian[c, c']`` is u_c^T A u_c'; the invariance residual
    measures how far A maps the cell span outside itself (0 for an exact
    collapse).
    """

    cell_vectors: np.ndarray
    reduced_hamiltonian: np.ndarray
    invariance_residual: float

    @property
    def exact(self) -> bool:
        return self.invariance_residual <= RESIDUAL_TOL


def _verified(graph: WeightedGraph, start: int, t: float, target: Distribution) -> MixingSolution:
    achieved = instantaneous_distribution(evolve(graph, start, t))
    residual = sup_distance(achieved, target)
    if residual > RESIDUAL_TOL:
        raise SolverVerificationError(
            f"solver self-check failed: residual {residual:.3e} > {RESIDUAL_TOL:.1e}"
        )
    return MixingSolution(graph, start, float(t), float(residual))


def _arcsin_sqrt(x: float) -> float:
    return math.asin(math.sqrt(min(1.0, max(0.0, x))))


def _end_start_parameters(p_end: float, p_far: float) -> tuple[float, float]:
    """Weight a and time t for the 3-path (1, a) hitting (p_end, ., p_far) from an end.

    The middle probability follows from normalization. Degenerate p_end = 1
    returns (1, 0).
    """
    gap = 1.0 - math.sqrt(p_end)
    if gap <= 0.0:
        return 1.0, 0.0
    a = math.sqrt(p_far) / gap
    gamma = gap / 2.0
    dsq = 1.0 + a * a
    t = 2.0 / math.sqrt(dsq) * _arcsin_sqrt(gamma * dsq)
    return a, t


def _star_center_weights(leaf_targets: np.ndarray) -> tuple[np.ndarray, float]:
    """Spoke weights (max normalized to 1) and time for a star walked from its center.

    From the center, p_center = cos^2(D t) and p_k = (a_k / D)^2 sin^2(D t)
    with D = sqrt(sum a_k^2); weights a_k = sqrt(p_k) and sin(D t) = D hit the
    target, and rescaling weights by c trades into time t / c.
    """
    total = float(leaf_targets.sum())
    if total == 0.0:
        return np.ones(leaf_targets.size), 0.0
    alpha = np.sqrt(leaf_targets)
    delta = math.sqrt(total)
    t = _arcsin_sqrt(total) / delta
    amax = float(alpha.max())
    return alpha / amax, t * amax


def _parse_p3_start(start) -> int:
    names = {"left": 0, "middle": 1, 0: 0, 1: 1}
    if isinstance(start, str):
        start = start.lower()
    if start not in names:
        raise ValueError(f"start must be 'left' or 'middle' (or 0/1), got {start!r}")
    return names[start]


def solve_p3(target, start="left") -> MixingSolution:
    """Weights and time for the 3-path to hit any distribution over its vertices.

    Vertices are labeled left = 0, middle = 1, right = 2. Every valid target
    is feasible from either supported start vertex.
    """
    target = as_distribution(target)
    if len(target) != 3:
        raise ValueError(f"3-path target must have 3 entries, got {len(target)}")
    s = _parse_p3_start(start)
    p_left, p_middle, p_right = (float(x) for x in target.probs)
    if s == 0:
        a, t = _end_start_parameters(p_left, p_right)
        graph = WeightedGraph(3, {(0, 1): 1.0, (1, 2): a})
    else:
        delta = math.sqrt(p_left + p_right)
        t = 0.0 if delta == 0.0 else _arcsin_sqrt(1.0 - p_middle) / delta
        graph = WeightedGraph(3, {(0, 1): math.sqrt(p_left), (1, 2): math.sqrt(p_right)})
    return _verified(graph, s, t, target)


def _parse_claw_start(start, n_leaves: int) -> int:
    if isinstance(start, str):
        if start.lower() == "center":
            return 0
        raise ValueError(f"start must be 'center' or a leaf index 1..{n_leaves}, got {start!r}")
    if not isinstance(start, (int, np.integer)) or not 0 <= start <= n_leaves:
        raise ValueError(f"start must be 'center' or a leaf index 1..{n_leaves}, got {start!r}")
    return int(start)


def solve_claw(target, start="center") -> MixingSolution:
    """Weights and time for the star K_{1,n} to hit any distribution over its n+1 vertices.

    Center is vertex 0, leaves are 1..n; the leaf count is inferred from the
    target length. Starting from a leaf reduces to the 3-path by collapsing
    the other leaves onto one cell, with spoke weights proportional to the
    square roots of their targets.
    """
    target = as_distribution(target)
    n = len(target) - 1
    if n < 1:
        raise ValueError("claw target needs at least 2 entries (center plus one leaf)")
    s = _parse_claw_start(start, n)
    probs = target.probs

    if s == 0:
        alpha, t = _star_center_weights(probs[1:])
        weights = {(0, k): alpha[k - 1] for k in range(1, n + 1)}
    else:
        others = [k for k in range(1, n + 1) if k != s]
        far_mass = float(probs[others].sum()) if others else 0.0
        a_star, t = _end_start_parameters(float(probs[s]), far_mass)
        weights = {(0, s): 1.0}
        if far_mass > 0.0:
            for k in others:
                weights[(0, k)] = a_star * math.sqrt(float(probs[k]) / far_mass)
    return _verified(WeightedGraph(n + 1, weights), s, t, target)


def _bipartite_canonical_weights(m: int, n: int, probs: np.ndarray) -> tuple[dict, float]:
    """Weights and time on canonical labels (side A = 0..m-1 with start 0, side B = m..m+n-1).

    The graph collapses onto cells {start}, B, A minus start. With
    w(start, b_j) = u_j and w(b_j, a_k) = d u_j sqrt(q_k), the reduced system
    is the 3-path with weights (D, d D sqrt(Q)), D = sqrt(sum u_j^2). The
    scale d = 1 / (1 - sqrt(q_0)) makes the reduced weight ratio equal the
    end-start requirement sqrt(Q) / (1 - sqrt(q_0)), and time rescales by 1/D.
    When side B carries no target mass but A minus start does, the walk still
    has to pass through B; uniform relay weights u_j = 1/sqrt(n) keep it
    connected while B ends at probability zero.
    """
    q0 = float(probs[0])
    q = probs[1:m]
    p = probs[m:]
    q_mass = float(q.sum())
    p_mass = float(p.sum())

    if p_mass + q_mass == 0.0:  # point mass at the start vertex
        weights = {(a, m + b): 1.0 for a in range(m) for b in range(n)}
        return weights, 0.0

    if p_mass > 0.0:
        u = np.sqrt(p)
        delta = math.sqrt(p_mass)
    else:
        u = np.full(n, 1.0 / math.sqrt(n))
        delta = 1.0
    gap = 1.0 - math.sqrt(q0)
    if gap <= 0.0:  # unreachable: q0 = 1 was handled above
        raise InfeasibleTargetError("start mass 1 with non-zero mass elsewhere")
    d = 1.0 / gap

    alpha_eff = d * math.sqrt(q_mass)
    dsq = 1.0 + alpha_eff * alpha_eff
    t_reduced = 2.0 / math.sqrt(dsq) * _arcsin_sqrt((gap / 2.0) * dsq)
    t = t_reduced / delta

    weights: dict[tuple[int, int], float] = {}
    for j in range(n):
        if u[j] != 0.0:
            weights[(0, m + j)] = float(u[j])
        for k in range(1, m):
            w = d * float(u[j]) * math.sqrt(float(probs[k]))
            if w != 0.0:
                weights[(k, m + j)] = w
    return weights, t


def solve_bipartite(m: int, n: int, target, start: int = 0) -> MixingSolution:
    """Weights and time for the complete bipartite graph K_{m,n} to hit any target.

    Side A is 0..m-1 and side B is m..m+n-1; the start may be any vertex
    (sides are swapped internally if it lies in B).
    """
    if not (isinstance(m, (int, np.integer)) and isinstance(n, (int, np.integer))) or m < 1 or n < 1:
        raise ValueError(f"part sizes must be integers >= 1, got ({m}, {n})")
    m, n = int(m), int(n)
    target = as_distribution(target)
    if len(target) != m + n:
        raise ValueError(f"target must have {m + n} entries for K_{{{m},{n}}}, got {len(target)}")
    if not isinstance(start, (int, np.integer)) or not 0 <= start < m + n:
        raise ValueError(f"start vertex {start!r} out of range")
    start = int(start)

    if start < m:
        perm = [start] + [v for v in range(m) if v != start] + list(range(m, m + n))
        mc, nc = m, n
    else:
        perm = [start] + [v for v in range(m, m + n) if v != start] + list(range(m))
        mc, nc = n, m

    probs_c = target.probs[perm]
    if mc == 1:
        alpha, t = _star_center_weights(probs_c[1:])
        weights_c = {(0, 1 + j): float(alpha[j]) for j in range(nc)}
    else:
        weights_c, t = _bipartite_canonical_weights(mc, nc, probs_c)
    weights = {(perm[j], perm[k]): w for (j, k), w in weights_c.items()}
    return _verified(WeightedGraph(m + n, weights), start, t, target)


def solve_multipartite(parts, target, start: int = 0) -> MixingSolution:
    """Weights and time for the complete k-partite graph (k >= 2) to hit any target.

    Cells occupy consecutive labels in the given order. All edges between
    cells other than the start's cell are set to zero, which leaves a complete
    bipartite graph between the start's cell and everything else; the returned
    weights live on the original k-partite edge set with those zeros implicit.
    """
    cells = multipartite_cells(parts)
    if len(cells) < 2:
        raise ValueError(f"need at least 2 parts, got {len(cells)}")
    total = sum(len(c) for c in cells)
    target = as_distribution(target)
    if len(target) != total:
        raise ValueError(f"target must have {total} entries, got {len(target)}")
    if not isinstance(start, (int, np.integer)) or not 0 <= start < total:
        raise ValueError(f"start vertex {start!r} out of range")
    start = int(start)

    if len(cells) == 2:
        return solve_bipartite(len(cells[0]), len(cells[1]), target, start)

    own = next(cell for cell in cells if start in cell)
    others = [v for cell in cells if cell is not own for v in cell]
    perm = list(own) + others
    inner = solve_bipartite(
        len(own),
        total - len(own),
        Distribution(target.probs[perm]),
        start=perm.index(start),
    )
    weights = {(perm[j], perm[k]): w for (j, k), w in inner.graph.weights.items()}
    return _verified(WeightedGraph(total, weights), start, inner.t, target)


def collapse(g: WeightedGraph, cell_vectors) -> CollapsedSystem:
    """Reduce the walk on ``g`` onto orthonormal cell vectors.

    ``cell_vectors`` is a sequence of length-n vectors (or an (n, c) column
    matrix). Rejects non-orthonormal cells. The reduction is exact when the
    adjacency matrix maps the cell span into itself (invariance residual 0).
    """
    u = np.asarray(cell_vectors, dtype=float)
    if u.ndim != 2:
        raise ValueError("cell vectors must form a 2-d array")
    if u.shape[0] != g.n and u.shape[1] == g.n:
        u = u.T  # accept a list of row vectors
    if u.shape[0] != g.n:
        raise ValueError(f"cell vectors must have length {g.n}, got shape {u.shape}")
    gram = u.T @ u
    if np.max(np.abs(gram - np.eye(u.shape[1]))) > _CELL_ORTHONORMALITY_TOL:
        raise ValueError("cell vectors must be orthonormal")

    a = g.adjacency_matrix()
    h = u.T @ a @ u
    h = (h + h.T) / 2.0
    residual = float(np.max(np.linalg.norm(a @ u - u @ h, axis=0))) if u.shape[1] else 0.0
    u = u.copy()
    u.setflags(write=False)
    h.setflags(write=False)
    return CollapsedSystem(u, h, residual)


def claw_reduction_cells(g: WeightedGraph, start_leaf: int) -> np.ndarray:
    """Cell vectors (columns) for a star walked from a leaf: the leaf, the
    center, and the remaining leaves weighted by their spoke weights.

    Zero-weight remainders are dropped (they stay decoupled)."""
    n = g.n - 1
    if not 1 <= start_leaf <= n:
        raise ValueError(f"start leaf {start_leaf} out of range 1..{n}")
    columns = [np.eye(g.n)[:, start_leaf], np.eye(g.n)[:, 0]]
    rest = np.zeros(g.n)
    for k in range(1, n + 1):
        if k != start_leaf:
            rest[k] = g.weight(0, k)
    norm = np.linalg.norm(rest)
    if norm > 0.0:
        columns.append(rest / norm)
    return np.column_stack(columns)


def bipartite_reduction_cells(g: WeightedGraph, m: int, start: int = 0) -> np.ndarray:
    """Cell vectors (columns) for a complete bipartite walk from a vertex of
    side A (labels 0..m-1): the start, side B weighted by its start-edge
    weights, and the rest of A weighted by its coupling to B.

    Cells with no weight are dropped."""
    if not 0 <= start < m:
        raise ValueError(f"start {start} must lie in side A (0..{m - 1})")
    n = g.n - m
    columns = [np.eye(g.n)[:, start]]
    middle = np.zeros(g.n)
    for j in range(n):
        middle[m + j] = g.weight(start, m + j)
    middle_norm = np.linalg.norm(middle)
    if middle_norm > 0.0:
        columns.append(middle / middle_norm)
    j_ref = int(np.argmax(middle[m:])) if middle_norm > 0.0 else 0
    right = np.zeros(g.n)
    for k in range(m):
        if k != start:
            right[k] = g.weight(k, m + j_ref)
    right_norm = np.linalg.norm(right)
    if right_norm > 0.0:
        columns.append(right / right_norm)
    return np.column_stack(columns)
