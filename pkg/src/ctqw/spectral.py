"""Symmetric eigendecomposition, distinct-eigenvalue grouping, and spectral projectors.

The spectral type tau of a graph is the number of distinct adjacency
eigenvalues. In floating point "distinct" needs a threshold: two eigenvalues
belong to the same group iff their gap is at most ``grouping_tol`` scaled by
``max(1, spectral radius)``. The threshold is configurable because everything
downstream that averages over time keys on this grouping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import WeightedGraph

DEFAULT_GROUPING_TOL = 1e-8
_EIGEN_RESIDUAL_TOL = 1e-9
_ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending), orthonormal eigenvectors (columns), and the
    partition of indices into equal-eigenvalue groups."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: tuple[tuple[int, ...], ...]
    grouping_tolerance: float  # absolute gap threshold actually used

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def spectral_type(self) -> int:
        return len(self.groups)

    @property
    def max_multiplicity(self) -> int:
        return max(len(g) for g in self.groups)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.n else 0.0

    def distinct_eigenvalues(self) -> np.ndarray:
        """One representative (group mean) per distinct eigenvalue, ascending."""
        return np.array([float(np.mean(self.eigenvalues[list(g)])) for g in self.groups])

    def multiplicities(self) -> list[int]:
        return [len(g) for g in self.groups]


def _group_indices(eigenvalues: np.ndarray, tol: float) -> tuple[tuple[int, ...], ...]:
    groups: list[list[int]] = []
    for i, lam in enumerate(eigenvalues):
        if groups and lam - eigenvalues[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


def decompose_matrix(a: np.ndarray, grouping_tol: float = DEFAULT_GROUPING_TOL) -> SpectralDecomposition:
    """Full decomposition of a real symmetric matrix.

    Raises RuntimeError if the solver result misses the residual or
    orthonormality contract (should not happen for finite symmetric input).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    if grouping_tol <= 0.0:
        raise ValueError(f"grouping tolerance must be positive, got {grouping_tol}")

    eigenvalues, eigenvectors = np.linalg.eigh(a)
    rho = max(1.0, float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0)
    tol = grouping_tol * rho
    groups = _group_indices(eigenvalues, tol)

    # Re-orthonormalize degenerate subspaces; projectors are basis independent.
    for g in groups:
        if len(g) > 1:
            q, _ = np.linalg.qr(eigenvectors[:, list(g)])
            eigenvectors[:, list(g)] = q

    residual = np.max(np.linalg.norm(a @ eigenvectors - eigenvectors * eigenvalues, axis=0))
    if residual > _EIGEN_RESIDUAL_TOL * rho:
        raise RuntimeError(f"eigendecomposition residual {residual:.3e} exceeds contract")
    gram_error = np.max(np.abs(eigenvectors.T @ eigenvectors - np.eye(a.shape[0])))
    if gram_error > _ORTHONORMALITY_TOL:
        raise RuntimeError(f"eigenvector orthonormality error {gram_error:.3e} exceeds contract")

    eigenvalues.setflags(write=False)
    eigenvectors.setflags(write=False)
    return SpectralDecomposition(eigenvalues, eigenvectors, groups, tol)


def decompose(g: WeightedGraph, grouping_tol: float = DEFAULT_GROUPING_TOL) -> SpectralDecomposition:
    """Decomposition of a graph's adjacency matrix."""
    return decompose_matrix(g.adjacency_matrix(), grouping_tol)


def spectral_type(d: SpectralDecomposition) -> int:
    """Number of distinct eigenvalues at the decomposition's grouping tolerance."""
    return d.spectral_type


def projector(d: SpectralDecomposition, group_index: int) -> np.ndarray:
    """Orthogonal projector onto the eigenspace of the group's eigenvalue."""
    if not 0 <= group_index < len(d.groups):
        raise ValueError(f"group index {group_index} out of range (have {len(d.groups)} groups)")
    u = d.eigenvectors[:, list(d.groups[group_index])]
    p = u @ u.T
    return (p + p.T) / 2.0


def projectors(d: SpectralDecomposition) -> list[np.ndarray]:
    return [projector(d, i) for i in range(len(d.groups))]
