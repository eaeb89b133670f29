"""Simple undirected edge-weighted graphs and the named families used by the toolkit.

Vertices are 0-based integers. Edge weights are non-negative reals stored once
per unordered pair; a weight of zero means the edge is absent. Graphs are
immutable: mutators return modified copies, so values can be shared freely
across threads.

Labeling conventions for the named families:
  * claw: center is vertex 0, leaves are 1..n
  * complete-multipartite: cells occupy consecutive labels in the given order
  * hypercube: vertex labels are bit strings, adjacent iff they differ in one bit
  * cartesian product: vertex (i, j) of G x H gets label i * |H| + j
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

FAMILIES = (
    "path",
    "cycle",
    "complete",
    "claw",
    "complete-multipartite",
    "hypercube",
    "circulant",
)


def _canonical(j: int, k: int) -> tuple[int, int]:
    return (j, k) if j < k else (k, j)


@dataclass(frozen=True)
class WeightedGraph:
    """An undirected graph on ``n`` vertices with symmetric non-negative weights.

    ``weights`` maps canonical vertex pairs (j, k) with j < k to positive
    weights; treat it as read-only.
    """

    n: int
    weights: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        canon: dict[tuple[int, int], float] = {}
        for (j, k), w in self.weights.items():
            self._check_edge(j, k, w)
            key = _canonical(int(j), int(k))
            if key in canon and canon[key] != float(w):
                raise ValueError(f"conflicting weights for edge {key}")
            if float(w) != 0.0:
                canon[key] = float(w)
        object.__setattr__(self, "weights", canon)

    def _check_edge(self, j: int, k: int, w: float) -> None:
        for v in (j, k):
            if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
                raise ValueError(f"vertex {v!r} out of range for a graph on {self.n} vertices")
        if j == k:
            raise ValueError(f"self-loop ({j}, {k}) not allowed")
        w = float(w)
        if not np.isfinite(w) or w < 0.0:
            raise ValueError(f"edge weight must be finite and non-negative, got {w}")

    def weight(self, j: int, k: int) -> float:
        """Weight of edge (j, k); 0.0 when the edge is absent."""
        return self.weights.get(_canonical(j, k), 0.0)

    def set_weight(self, j: int, k: int, w: float) -> "WeightedGraph":
        """Return a copy with edge (j, k) set to ``w``; ``w = 0`` removes the edge."""
        self._check_edge(j, k, w)
        updated = dict(self.weights)
        key = _canonical(j, k)
        if float(w) == 0.0:
            updated.pop(key, None)
        else:
            updated[key] = float(w)
        return WeightedGraph(self.n, updated)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for (j, k) in sorted(self.weights):
            yield j, k, self.weights[(j, k)]

    @property
    def num_edges(self) -> int:
        return len(self.weights)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric adjacency matrix; both mirror entries are copies of the stored weight."""
        a = np.zeros((self.n, self.n))
        for (j, k), w in self.weights.items():
            a[j, k] = w
            a[k, j] = w
        return a


@dataclass(frozen=True)
class PartitionedGraph:
    """A graph together with a partition of its vertices into cells.

    Used for complete multipartite structure, so cells must be pairwise
    disjoint, cover every vertex, and contain no internal edges.
    """

    graph: WeightedGraph
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        cells = tuple(tuple(int(v) for v in cell) for cell in self.cells)
        object.__setattr__(self, "cells", cells)
        seen: set[int] = set()
        for cell in cells:
            if not cell:
                raise ValueError("empty cell in partition")
            for v in cell:
                if not 0 <= v < self.graph.n:
                    raise ValueError(f"cell vertex {v} out of range")
                if v in seen:
                    raise ValueError(f"vertex {v} appears in more than one cell")
                seen.add(v)
        if len(seen) != self.graph.n:
            raise ValueError("cells do not cover the full vertex set")
        for cell in cells:
            for j, k in itertools.combinations(cell, 2):
                if self.graph.weight(j, k) != 0.0:
                    raise ValueError(f"edge ({j}, {k}) inside a cell has non-zero weight")

    def cell_of(self, v: int) -> int:
        for i, cell in enumerate(self.cells):
            if v in cell:
                return i
        raise ValueError(f"vertex {v} not in any cell")


def multipartite_cells(parts: Iterable[int]) -> tuple[tuple[int, ...], ...]:
    """Consecutive-label cells for part sizes ``parts`` (the multipartite labeling)."""
    cells = []
    offset = 0
    for size in parts:
        size = int(size)
        if size < 1:
            raise ValueError(f"part sizes must be >= 1, got {size}")
        cells.append(tuple(range(offset, offset + size)))
        offset += size
    return tuple(cells)


def build_family(
    family: str,
    *,
    n: int | None = None,
    parts: Iterable[int] | None = None,
    connection_set: Iterable[int] | None = None,
) -> WeightedGraph:
    """Construct the unweighted (all weights 1) member of a named family.

    ``n`` is the vertex count for path/cycle/complete/circulant, the leaf
    count for the claw, and the dimension for the hypercube. The multipartite
    family takes ``parts`` (cell sizes); circulants take ``connection_set``,
    a set of non-zero shifts closed under negation mod n.
    """
    family = family.lower()
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")

    def need_n(minimum: int) -> int:
        if n is None:
            raise ValueError(f"family {family!r} requires parameter n")
        if not isinstance(n, (int, np.integer)) or n < minimum:
            raise ValueError(f"family {family!r} requires integer n >= {minimum}, got {n!r}")
        return int(n)

    if family == "path":
        m = need_n(1)
        return WeightedGraph(m, {(i, i + 1): 1.0 for i in range(m - 1)})
    if family == "cycle":
        m = need_n(3)
        return WeightedGraph(m, {(i, (i + 1) % m): 1.0 for i in range(m)})
    if family == "complete":
        m = need_n(1)
        return WeightedGraph(m, {e: 1.0 for e in itertools.combinations(range(m), 2)})
    if family == "claw":
        leaves = need_n(1)
        return WeightedGraph(leaves + 1, {(0, k): 1.0 for k in range(1, leaves + 1)})
    if family == "complete-multipartite":
        if parts is None:
            raise ValueError("complete-multipartite requires parameter parts")
        cells = multipartite_cells(parts)
        total = sum(len(c) for c in cells)
        weights = {}
        for a, b in itertools.combinations(range(len(cells)), 2):
            for j in cells[a]:
                for k in cells[b]:
                    weights[(j, k)] = 1.0
        return WeightedGraph(total, weights)
    if family == "hypercube":
        dim = need_n(0)
        if dim > 20:
            raise ValueError(f"hypercube dimension {dim} too large")
        size = 1 << dim
        weights = {}
        for v in range(size):
            for bit in range(dim):
                u = v ^ (1 << bit)
                if u > v:
                    weights[(v, u)] = 1.0
        return WeightedGraph(size, weights)
    if family == "circulant":
        m = need_n(2)
        if connection_set is None:
            raise ValueError("circulant requires parameter connection_set")
        shifts = sorted({int(s) for s in connection_set})
        if not shifts:
            raise ValueError("circulant connection set must be non-empty")
        for s in shifts:
            if s == 0:
                raise ValueError("circulant connection set must not contain 0 (no self-loops)")
            if not 1 <= s <= m - 1:
                raise ValueError(f"circulant shift {s} out of range 1..{m - 1}")
            if (m - s) % m not in shifts:
                raise ValueError(f"circulant connection set not closed under negation: missing {(m - s) % m}")
        weights = {}
        for j in range(m):
            for s in shifts:
                k = (j + s) % m
                weights[_canonical(j, k)] = 1.0
        return WeightedGraph(m, weights)
    raise AssertionError("unreachable")


def cartesian_product(g: WeightedGraph, h: WeightedGraph) -> WeightedGraph:
    """Cartesian product graph; vertex (i, j) gets label i * |H| + j.

    (g1, h1) ~ (g2, h2) iff g1 = g2 and h1 ~ h2 (weight from H), or
    h1 = h2 and g1 ~ g2 (weight from G).
    """
    weights: dict[tuple[int, int], float] = {}
    for (g1, g2), w in g.weights.items():
        for j in range(h.n):
            weights[(g1 * h.n + j, g2 * h.n + j)] = w
    for (h1, h2), w in h.weights.items():
        for i in range(g.n):
            weights[(i * h.n + h1, i * h.n + h2)] = w
    return WeightedGraph(g.n * h.n, weights)


def scale_weights(g: WeightedGraph, factor: float) -> WeightedGraph:
    """Multiply every edge weight by a non-negative factor."""
    factor = float(factor)
    if not np.isfinite(factor) or factor < 0.0:
        raise ValueError(f"scale factor must be finite and non-negative, got {factor}")
    return WeightedGraph(g.n, {e: w * factor for e, w in g.weights.items()})


def is_connected(g: WeightedGraph) -> bool:
    """Whether every vertex is reachable from vertex 0 through positive-weight edges."""
    adjacency: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for j, k, _ in g.edges():
        adjacency[j].append(k)
        adjacency[k].append(j)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adjacency[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == g.n


def graph_to_json(g: WeightedGraph, cells: Iterable[Iterable[int]] | None = None) -> dict:
    """Serialize to the graph JSON schema {"n", "edges", "cells"?}; each edge listed once."""
    payload: dict = {
        "n": g.n,
        "edges": [[j, k, w] for j, k, w in g.edges()],
    }
    if cells is not None:
        payload["cells"] = [list(int(v) for v in cell) for cell in cells]
    return payload


def graph_from_json(data: dict) -> tuple[WeightedGraph, tuple[tuple[int, ...], ...] | None]:
    """Parse the graph JSON schema, returning the graph and optional cells.

    Each edge must be listed exactly once (symmetry by construction) with a
    non-negative weight.
    """
    if not isinstance(data, dict):
        raise ValueError("graph JSON must be an object")
    if "n" not in data or "edges" not in data:
        raise ValueError('graph JSON must contain "n" and "edges"')
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise ValueError(f'"n" must be a positive integer, got {n!r}')
    edges = data["edges"]
    if not isinstance(edges, list):
        raise ValueError('"edges" must be a list of [j, k, w] triples')
    weights: dict[tuple[int, int], float] = {}
    for entry in edges:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ValueError(f"bad edge entry {entry!r}; expected [j, k, w]")
        j, k, w = entry
        if not isinstance(j, int) or not isinstance(k, int):
            raise ValueError(f"edge endpoints must be integers, got {entry!r}")
        key = _canonical(j, k)
        if key in weights:
            raise ValueError(f"edge ({j}, {k}) listed more than once")
        weights[key] = w
    graph = WeightedGraph(n, weights)
    cells = None
    if data.get("cells") is not None:
        cells = tuple(tuple(int(v) for v in cell) for cell in data["cells"])
        PartitionedGraph(graph, cells)  # validates partition and cell independence
    return graph, cells


def load_graph(path: str) -> tuple[WeightedGraph, tuple[tuple[int, ...], ...] | None]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return graph_from_json(data)


def save_graph(path: str, g: WeightedGraph, cells: Iterable[Iterable[int]] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_json(g, cells), fh, indent=2, sort_keys=True)
        fh.write("\n")
