"""Affinity graph and random-walk transition matrix from pairwise distances.

Similarities come from a self-tuning Gaussian kernel,
``W_ij = exp(-d_ij**2 / (sigma_i * sigma_j))``, where ``sigma_i`` is the
distance from instance ``i`` to its ``kernel_k``-th nearest neighbour.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError, ShapeError
from .linalg import as_matrix, row_normalize

DEFAULT_KERNEL_K = 7
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    d: np.ndarray

    def __post_init__(self):
        d = as_matrix(self.d, "distance matrix")
        n = d.shape[0]
        if d.shape != (n, n) or n == 0:
            raise ShapeError(f"distance matrix must be square and non-empty, got {d.shape}")
        if d.min() < 0:
            idx = tuple(int(i) for i in np.argwhere(d < 0)[0])
            raise DomainError(f"negative distance at {idx}")
        if np.any(np.diag(d) != 0):
            i = int(np.flatnonzero(np.diag(d))[0])
            raise DomainError(f"distance matrix diagonal must be zero, d[{i},{i}]={d[i, i]!r}")
        asym = np.abs(d - d.T)
        if asym.max() > SYMMETRY_TOL:
            idx = tuple(int(i) for i in np.unravel_index(np.argmax(asym), d.shape))
            raise DomainError(f"distance matrix not symmetric at {idx} (gap {asym.max():.3e})")
        object.__setattr__(self, "d", d)

    @property
    def n(self):
        return self.d.shape[0]


@dataclass(frozen=True)
class AffinityGraph:
    w: np.ndarray
    p: np.ndarray
    sigmas: np.ndarray
    kernel_k: int
    sigma_floor: float

    @property
    def n(self):
        return self.sigmas.shape[0]


def _positive_floor(sigmas):
    positive = sigmas[sigmas > 0]
    return float(positive.min()) if positive.size else 1.0


def _knn_mask(d, k):
    # k nearest neighbours of each row, excluding the row itself
    n = d.shape[0]
    masked = d + np.diag(np.full(n, np.inf))
    nearest = np.argsort(masked, axis=1, kind="stable")[:, :k]
    mask = np.zeros((n, n), dtype=bool)
    mask[np.arange(n)[:, None], nearest] = True
    return mask | mask.T


def build_graph(dist, kernel_k=DEFAULT_KERNEL_K, sparsify_knn: Optional[int] = None):
    """Build ``W`` and ``P = row_normalize(W)`` over the database.

    ``sparsify_knn`` keeps only edges where either endpoint is among the
    other's ``sparsify_knn`` nearest neighbours; ``None`` keeps the dense graph.
    """
    if not isinstance(dist, DistanceMatrix):
        dist = DistanceMatrix(dist)
    d = dist.d
    n = dist.n
    if not 1 <= kernel_k < n:
        raise ConfigError(f"kernel_k must satisfy 1 <= kernel_k < {n}, got {kernel_k}")

    off_diag = d + np.diag(np.full(n, np.inf))
    sigmas = np.sort(off_diag, axis=1)[:, kernel_k - 1]
    floor = _positive_floor(sigmas)
    sigmas = np.where(sigmas > 0, sigmas, floor)

    w = np.exp(-(d ** 2) / np.outer(sigmas, sigmas))
    np.fill_diagonal(w, 0.0)
    if sparsify_knn is not None:
        if not 1 <= sparsify_knn < n:
            raise ConfigError(f"sparsify_knn must satisfy 1 <= k < {n}, got {sparsify_knn}")
        w = np.where(_knn_mask(d, sparsify_knn), w, 0.0)
    return AffinityGraph(w=w, p=row_normalize(w), sigmas=sigmas, kernel_k=kernel_k, sigma_floor=floor)


def probe_transition_row(graph, dist_probe, kernel_k=None):
    """Transition probabilities from an unseen probe to every database vertex."""
    dist_probe = np.asarray(dist_probe, dtype=np.float64)
    if dist_probe.shape != (graph.n,):
        raise ShapeError(f"probe distances have shape {dist_probe.shape}, expected ({graph.n},)")
    if not np.all(np.isfinite(dist_probe)) or dist_probe.min() < 0:
        raise DomainError("probe distances must be finite and non-negative")
    k = graph.kernel_k if kernel_k is None else kernel_k
    if not 1 <= k <= graph.n:
        raise ConfigError(f"kernel_k must satisfy 1 <= kernel_k <= {graph.n}, got {k}")

    sigma_p = np.partition(dist_probe, k - 1)[k - 1]
    if sigma_p <= 0:
        sigma_p = graph.sigma_floor
    row = np.exp(-(dist_probe ** 2) / (sigma_p * graph.sigmas))
    total = row.sum()
    if total == 0:
        return np.full(graph.n, 1.0 / graph.n)
    return row / total
