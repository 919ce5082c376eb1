"""Offline learning and online ranking, end to end."""

from dataclasses import dataclass, field
from typing import Optional

from .embedding import precompute_factor, query_distances, rank_by_distance
from .graph import DEFAULT_KERNEL_K, build_graph
from .labels import build_labels
from .propagation import PropagationConfig, iterate_accelerated


@dataclass(frozen=True)
class LearnConfig:
    propagation: PropagationConfig = field(default_factory=PropagationConfig)
    kernel_k: int = DEFAULT_KERNEL_K
    sparsify_knn: Optional[int] = None
    labeled_diagonal: bool = True


@dataclass
class Learned:
    graph: object
    labels: object
    model: object
    factor: object


def learn(db_distances, layout, identities, cfg=LearnConfig()):
    graph = build_graph(db_distances, kernel_k=cfg.kernel_k, sparsify_knn=cfg.sparsify_knn)
    labels = build_labels(layout, identities, labeled_diagonal=cfg.labeled_diagonal)
    model = iterate_accelerated(graph.p, labels.l, cfg.propagation, layout=layout)
    factor = precompute_factor(model, graph)
    return Learned(graph=graph, labels=labels, model=model, factor=factor)


def rank_probes(learned, probe_distances):
    return [query_distances(learned.factor, learned.graph, row) for row in probe_distances]


def rank_baseline(probe_gallery_distances):
    return [rank_by_distance(row) for row in probe_gallery_distances]
