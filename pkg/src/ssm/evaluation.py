"""CMC curves and mean average precision over ranked gallery lists."""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ShapeError


@dataclass(frozen=True)
class GroundTruth:
    probe_identities: Sequence
    gallery_identities: Sequence
    # probes allowed to have no true match in the gallery
    distractor_only: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class CmcCurve:
    accuracy_at_rank: np.ndarray

    def at(self, rank):
        """Accuracy at a 1-based rank."""
        return float(self.accuracy_at_rank[rank - 1])


def _match_flags(rankings, truth):
    if len(rankings) != len(truth.probe_identities):
        raise ShapeError(f"{len(rankings)} rankings for {len(truth.probe_identities)} probes")
    gallery = np.asarray(truth.gallery_identities)
    n_g = gallery.shape[0]
    for idx, (ranking, pid) in enumerate(zip(rankings, truth.probe_identities)):
        order = np.asarray(ranking.order)
        if order.shape != (n_g,):
            raise ShapeError(f"probe {idx}: ranking covers {order.shape[0]} of {n_g} gallery items")
        hits = gallery[order] == pid
        if not hits.any() and idx not in truth.distractor_only:
            raise DomainError(f"probe {idx} (identity {pid!r}) has no match in the gallery")
        yield hits


def cmc(rankings, truth):
    """Fraction of probes whose first true match is within each rank."""
    n_g = len(truth.gallery_identities)
    counts = np.zeros(n_g)
    n_probes = 0
    for hits in _match_flags(rankings, truth):
        n_probes += 1
        if hits.any():
            counts[int(np.argmax(hits))] += 1
    if n_probes == 0:
        raise ShapeError("no probes to evaluate")
    return CmcCurve(accuracy_at_rank=np.cumsum(counts) / n_probes)


def average_precision(hits):
    hits = np.asarray(hits, dtype=bool)
    ranks = np.flatnonzero(hits) + 1
    if ranks.size == 0:
        return 0.0
    return float(np.mean(np.arange(1, ranks.size + 1) / ranks))


def mean_average_precision(rankings, truth):
    aps = [average_precision(hits) for hits in _match_flags(rankings, truth)]
    if not aps:
        raise ShapeError("no probes to evaluate")
    return float(np.mean(aps))


def summarize_trials(curves, ranks=(1, 5, 10, 20)):
    """Per-trial accuracies at ``ranks`` plus their mean, as a dict of rows."""
    rows = {}
    for trial, curve in enumerate(curves):
        rows[f"trial{trial}"] = [curve.at(r) for r in ranks if r <= len(curve.accuracy_at_rank)]
    rows["mean"] = list(np.mean(np.array(list(rows.values())), axis=0))
    return rows
