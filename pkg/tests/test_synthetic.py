import numpy as np
import pytest

from ssm.errors import ConfigError
from ssm.graph import DistanceMatrix
from ssm.pipeline import rank_baseline
from ssm.evaluation import cmc
from ssm.synthetic import SyntheticSpec, generate_synthetic


def test_noiseless_probe_hits_true_match():
    data = generate_synthetic(SyntheticSpec(noise_scale=0.0, camera_offset_scale=0.0, seed=3))
    truth = data.truth
    g = data.probe_gallery_distances
    for i, pid in enumerate(truth.probe_identities):
        match = truth.gallery_identities.index(pid)
        assert g[i, match] == 0.0
    assert cmc(rank_baseline(g), truth).at(1) == 1.0


def test_deterministic():
    a = generate_synthetic(SyntheticSpec(seed=11))
    b = generate_synthetic(SyntheticSpec(seed=11))
    assert a.db_distances.tobytes() == b.db_distances.tobytes()
    assert a.probe_distances.tobytes() == b.probe_distances.tobytes()
    assert a.truth == b.truth
    np.testing.assert_array_equal(a.labeled_identities, b.labeled_identities)
    c = generate_synthetic(SyntheticSpec(seed=12))
    assert a.db_distances.tobytes() != c.db_distances.tobytes()


def test_split_sizes():
    spec = SyntheticSpec(n_identities=50, images_per_identity=2, n_distractors=50)
    data = generate_synthetic(spec)
    assert data.layout.n_labeled == 50
    assert data.layout.n_gallery == 25 + 50
    assert data.probe_distances.shape == (25, 125)
    DistanceMatrix(data.db_distances)
    counts = np.unique(data.labeled_identities, return_counts=True)[1]
    assert np.all(counts == 2)


def test_multishot_gallery():
    data = generate_synthetic(SyntheticSpec(n_identities=6, images_per_identity=4, n_distractors=2))
    assert data.layout.n_gallery == 3 * 3 + 2
    assert data.layout.n_labeled == 3 * 4


@pytest.mark.parametrize("kwargs", [{"n_identities": 1}, {"images_per_identity": 1},
                                    {"noise_scale": -1.0}, {"n_distractors": -1}])
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigError):
        SyntheticSpec(**kwargs)


def test_intra_below_inter_at_low_noise():
    for seed in range(5):
        data = generate_synthetic(SyntheticSpec(noise_scale=0.1, seed=seed))
        lab = data.layout.labeled
        d = data.db_distances[lab, lab]
        ids = data.labeled_identities
        same = ids[:, None] == ids[None, :]
        off = ~np.eye(len(ids), dtype=bool)
        assert np.median(d[same & off]) < np.median(d[~same])
