"""Two-camera synthetic re-identification data.

Each identity has a Gaussian centre. View 0 is seen by camera A; the other
views are seen by camera B, which adds a fixed offset of length
``camera_offset_scale`` in a random direction, shared by all camera B images.
Half the identities (rounded down) form the labeled set; for the rest, view 0
is the probe and the camera B views go to the gallery, followed by
single-image distractors from camera B.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .evaluation import GroundTruth
from .labels import DatasetLayout


@dataclass(frozen=True)
class SyntheticSpec:
    n_identities: int = 50
    images_per_identity: int = 2
    feature_dim: int = 16
    camera_offset_scale: float = 2.0
    noise_scale: float = 0.6
    n_distractors: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.n_identities < 2:
            raise ConfigError("need at least 2 identities to form labeled and test splits")
        if self.images_per_identity < 2:
            raise ConfigError("need at least 2 images per identity (one per camera)")
        if self.feature_dim < 1 or self.n_distractors < 0:
            raise ConfigError(f"invalid sizes in {self}")
        if self.camera_offset_scale < 0 or self.noise_scale < 0:
            raise ConfigError("scales must be non-negative")


@dataclass(frozen=True)
class SyntheticData:
    """Database distances are in ``[gallery | labeled]`` order."""

    layout: DatasetLayout
    db_distances: np.ndarray
    probe_distances: np.ndarray
    labeled_identities: np.ndarray
    truth: GroundTruth

    @property
    def probe_gallery_distances(self):
        return self.probe_distances[:, self.layout.gallery]


def _pairwise(a, b):
    return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)


def generate_synthetic(spec):
    rng = np.random.default_rng(spec.seed)
    dim = spec.feature_dim
    centres = rng.standard_normal((spec.n_identities, dim))
    direction = rng.standard_normal(dim)
    offset = spec.camera_offset_scale * direction / np.linalg.norm(direction)

    views = np.arange(spec.images_per_identity)
    camera_b = (views > 0).astype(np.float64)[:, None] * offset
    images = (
        centres[:, None, :]
        + camera_b[None, :, :]
        + spec.noise_scale * rng.standard_normal((spec.n_identities, spec.images_per_identity, dim))
    )
    distractors = (
        rng.standard_normal((spec.n_distractors, dim))
        + offset
        + spec.noise_scale * rng.standard_normal((spec.n_distractors, dim))
    )

    n_lab_ids = spec.n_identities // 2
    lab_ids = np.arange(n_lab_ids)
    test_ids = np.arange(n_lab_ids, spec.n_identities)

    labeled = images[lab_ids].reshape(-1, dim)
    labeled_identities = np.repeat(lab_ids, spec.images_per_identity)
    probes = images[test_ids, 0]
    gallery = np.concatenate([images[test_ids, 1:].reshape(-1, dim), distractors])
    gallery_identities = np.concatenate([
        np.repeat(test_ids, spec.images_per_identity - 1),
        spec.n_identities + np.arange(spec.n_distractors),
    ])

    database = np.concatenate([gallery, labeled])
    db = _pairwise(database, database)
    probe_d = _pairwise(probes, database)

    return SyntheticData(
        layout=DatasetLayout(n_gallery=gallery.shape[0], n_labeled=labeled.shape[0]),
        db_distances=db,
        probe_distances=probe_d,
        labeled_identities=labeled_identities,
        truth=GroundTruth(probe_identities=tuple(test_ids.tolist()),
                          gallery_identities=tuple(gallery_identities.tolist())),
    )
