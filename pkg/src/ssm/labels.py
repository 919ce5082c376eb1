"""Pairwise equivalence constraints over the ``[gallery | labeled]`` vertex order."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class DatasetLayout:
    n_gallery: int
    n_labeled: int

    def __post_init__(self):
        if self.n_gallery < 0 or self.n_labeled < 0:
            raise ConfigError(f"block sizes must be non-negative: {self}")
        if self.n_gallery + self.n_labeled == 0:
            raise ConfigError("layout has no vertices")

    @property
    def n(self):
        return self.n_gallery + self.n_labeled

    @property
    def gallery(self):
        return slice(0, self.n_gallery)

    @property
    def labeled(self):
        return slice(self.n_gallery, self.n)


@dataclass(frozen=True)
class ConstraintLabels:
    layout: DatasetLayout
    identities: tuple
    l: np.ndarray


def build_labels(layout, identities, labeled_diagonal=True):
    """``L_ij = 1`` when ``i`` and ``j`` are labeled and share an identity.

    Set ``labeled_diagonal=False`` to zero the self-pairs as well.
    """
    identities = tuple(identities)
    if len(identities) != layout.n_labeled:
        raise ShapeError(f"got {len(identities)} identities for {layout.n_labeled} labeled instances")
    ids = np.asarray(identities)
    l = np.zeros((layout.n, layout.n))
    if layout.n_labeled:
        same = (ids[:, None] == ids[None, :]).astype(np.float64)
        if not labeled_diagonal:
            np.fill_diagonal(same, 0.0)
        l[layout.labeled, layout.labeled] = same
    return ConstraintLabels(layout=layout, identities=identities, l=l)
