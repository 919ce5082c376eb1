import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import first_match_ranks
from ssm.embedding import RankingResult, rank_scores
from ssm.errors import DomainError
from ssm.evaluation import GroundTruth, average_precision, cmc, mean_average_precision, summarize_trials


def ranking(order):
    order = np.asarray(order)
    scores = np.empty(len(order))
    scores[order] = -np.arange(len(order), dtype=float)
    return RankingResult(scores=scores, order=order)


class TestCmc:
    def test_first_rank_hit(self):
        curve = cmc([ranking([2, 0, 1])], GroundTruth([9], [1, 2, 9]))
        np.testing.assert_array_equal(curve.accuracy_at_rank, [1, 1, 1])

    def test_counting(self):
        truth = GroundTruth([0, 1], [0, 1, 2, 3, 4])
        curve = cmc([ranking([0, 1, 2, 3, 4]), ranking([0, 2, 1, 3, 4])], truth)
        np.testing.assert_array_equal(curve.accuracy_at_rank, [0.5, 0.5, 1.0, 1.0, 1.0])
        assert curve.at(3) == 1.0

    def test_unmatched_probe(self):
        with pytest.raises(DomainError):
            cmc([ranking([0, 1])], GroundTruth([5], [0, 1]))
        curve = cmc([ranking([0, 1])], GroundTruth([5], [0, 1], distractor_only=frozenset({0})))
        np.testing.assert_array_equal(curve.accuracy_at_rank, [0, 0])

    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 6))
    def test_curve_properties_and_shuffle_invariance(self, seed, n_ids, n_distract):
        gen = np.random.default_rng(seed)
        gallery = list(range(n_ids)) + [100 + i for i in range(n_distract)]
        probes = list(gen.permutation(n_ids))
        scores = [gen.permutation(len(gallery)).astype(float) for _ in probes]
        truth = GroundTruth(probes, gallery)
        curve = cmc([rank_scores(s) for s in scores], truth)
        acc = curve.accuracy_at_rank
        assert np.all(np.diff(acc) >= 0) and acc[-1] == 1.0

        perm = gen.permutation(len(gallery))
        shuffled = GroundTruth(probes, [gallery[i] for i in perm])
        curve2 = cmc([rank_scores(s[perm]) for s in scores], shuffled)
        np.testing.assert_array_equal(curve2.accuracy_at_rank, acc)

        first = [first_match_ranks(rank_scores(s).order, pid, gallery)[0] for s, pid in zip(scores, probes)]
        for r in range(1, len(gallery) + 1):
            assert acc[r - 1] == pytest.approx(np.mean(np.array(first) <= r))


class TestMap:
    def test_matches_at_one_and_three(self):
        assert average_precision([True, False, True, False]) == pytest.approx(5 / 6)

    def test_perfect(self):
        truth = GroundTruth([1], [1, 1, 1, 0, 2])
        assert mean_average_precision([ranking([0, 1, 2, 3, 4])], truth) == 1.0

    def test_reversed_single_match(self):
        truth = GroundTruth([1], [1, 0, 2, 3])
        assert mean_average_precision([ranking([3, 2, 1, 0])], truth) == 0.25

    @given(st.integers(0, 2**32 - 1))
    def test_range_and_perfect_iff(self, seed):
        gen = np.random.default_rng(seed)
        gallery = list(gen.integers(0, 3, size=8))
        probes = [g for g in range(3) if g in gallery]
        rankings = [rank_scores(gen.random(8)) for _ in probes]
        truth = GroundTruth(probes, gallery)
        m = mean_average_precision(rankings, truth)
        assert 0.0 <= m <= 1.0
        perfect = all(
            max(first_match_ranks(r.order, p, gallery)) == gallery.count(p)
            for r, p in zip(rankings, probes)
        )
        assert (m == 1.0) == perfect


def test_summarize_trials():
    a = cmc([ranking([0, 1])], GroundTruth([0], [0, 1]))
    b = cmc([ranking([1, 0])], GroundTruth([0], [0, 1]))
    rows = summarize_trials([a, b], ranks=(1, 2))
    assert rows["trial0"] == [1.0, 1.0] and rows["trial1"] == [0.0, 1.0]
    assert rows["mean"] == [0.5, 1.0]
