"""Online probe matching against a learned model.

With the database similarity ``Q`` fixed, a probe ``p`` with transition row
``[P_pX P_pY]`` gets gallery scores ``row @ Q @ P[gallery, :].T``. The right
two factors do not depend on the probe, so they are multiplied once offline
into ``R`` and each query costs a single vector-matrix product.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .graph import build_graph, probe_transition_row
from .labels import build_labels
from .propagation import PropagationConfig, iterate_accelerated


@dataclass(frozen=True)
class OnlineFactor:
    r: np.ndarray

    @property
    def n_gallery(self):
        return self.r.shape[1]


@dataclass(frozen=True)
class RankingResult:
    scores: np.ndarray
    order: np.ndarray


def rank_scores(scores):
    """Sort descending by score, ties going to the lower index."""
    scores = np.asarray(scores, dtype=np.float64)
    return RankingResult(scores=scores, order=np.argsort(-scores, kind="stable"))


def rank_by_distance(dist_row):
    """Baseline ranking straight from probe-to-gallery distances."""
    dist_row = np.asarray(dist_row, dtype=np.float64)
    return RankingResult(scores=-dist_row, order=np.argsort(dist_row, kind="stable"))


def precompute_factor(model, graph):
    """Compute ``R = Q @ P[gallery, :].T`` and attach it to ``model``."""
    if graph.n != model.layout.n:
        raise ShapeError(f"graph has {graph.n} vertices, model layout has {model.layout.n}")
    r = model.q @ graph.p[model.layout.gallery, :].T
    model.r = r
    return OnlineFactor(r=r)


def query(factor, probe_row):
    probe_row = np.asarray(probe_row, dtype=np.float64)
    if probe_row.shape != (factor.r.shape[0],):
        raise ShapeError(f"probe row has shape {probe_row.shape}, expected ({factor.r.shape[0]},)")
    return rank_scores(probe_row @ factor.r)


def query_distances(factor, graph, dist_probe):
    return query(factor, probe_transition_row(graph, dist_probe))


def requery_full(dist_db, dist_probe, layout, identities, cfg=PropagationConfig(), kernel_k=7):
    """Naive per-probe pipeline: rebuild the graph with the probe as an extra
    vertex, rerun propagation from scratch, and read off the probe's gallery
    scores.

    Costs ``O(T N^3)`` per probe; kept as the slow arm of the benchmark.
    """
    dist_db = np.asarray(dist_db, dtype=np.float64)
    dist_probe = np.asarray(dist_probe, dtype=np.float64)
    n = dist_db.shape[0]
    if dist_probe.shape != (n,):
        raise ShapeError(f"probe distances have shape {dist_probe.shape}, expected ({n},)")
    full = np.zeros((n + 1, n + 1))
    full[:n, :n] = dist_db
    full[n, :n] = full[:n, n] = dist_probe
    graph = build_graph(full, kernel_k=kernel_k)
    l = np.zeros((n + 1, n + 1))
    l[:n, :n] = build_labels(layout, identities).l
    q = iterate_accelerated(graph.p, l, cfg).q
    return rank_scores(q[n, layout.gallery])
