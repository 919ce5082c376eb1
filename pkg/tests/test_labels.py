import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssm.errors import ConfigError, ShapeError
from ssm.labels import DatasetLayout, build_labels


def test_same_identity_pair():
    c = build_labels(DatasetLayout(0, 2), [7, 7])
    np.testing.assert_array_equal(c.l, [[1, 1], [1, 1]])


def test_different_identities():
    c = build_labels(DatasetLayout(0, 2), [7, 8])
    np.testing.assert_array_equal(c.l, [[1, 0], [0, 1]])


def test_gallery_block_is_zero():
    c = build_labels(DatasetLayout(3, 4), [1, 1, 2, 2])
    assert not c.l[:3, :].any() and not c.l[:, :3].any()


def test_zero_diagonal_option():
    c = build_labels(DatasetLayout(1, 3), [5, 5, 6], labeled_diagonal=False)
    expected = np.zeros((4, 4))
    expected[1, 2] = expected[2, 1] = 1
    np.testing.assert_array_equal(c.l, expected)


def test_length_mismatch():
    with pytest.raises(ShapeError):
        build_labels(DatasetLayout(2, 3), [1, 2])


def test_layout_validation():
    with pytest.raises(ConfigError):
        DatasetLayout(0, 0)
    with pytest.raises(ConfigError):
        DatasetLayout(-1, 2)


@given(st.integers(0, 5), st.lists(st.integers(0, 4), min_size=1, max_size=12))
def test_structure(n_gallery, identities):
    c = build_labels(DatasetLayout(n_gallery, len(identities)), identities)
    np.testing.assert_array_equal(c.l, c.l.T)
    assert set(np.unique(c.l)) <= {0.0, 1.0}
    sizes = np.unique(identities, return_counts=True)[1]
    assert int(c.l.sum()) == int((sizes ** 2).sum())
    assert not c.l[:n_gallery, :n_gallery].any()
