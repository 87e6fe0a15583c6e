"""Hard-voting combiner."""

import itertools

import pytest

from cfx.ensemble import EnsembleConfig, vote, vote_many
from cfx.errors import CfxError, DataFormatError


def test_default_threshold_one_positive_of_three_wins():
    assert vote([1, 0, 0]) == 1
    assert vote([0, 0, 0]) == 0


def test_majority_threshold():
    half = EnsembleConfig(threshold=0.5)
    assert vote([1, 0, 0], half) == 0
    assert vote([1, 1, 0], half) == 1  # 2/3 >= 0.5
    assert vote([1, 0, 1, 0], half) == 1  # exactly at threshold counts


def test_unanimity_threshold():
    one = EnsembleConfig(threshold=1.0)
    assert vote([1, 1, 1], one) == 1
    assert vote([1, 1, 0], one) == 0


def test_threshold_validation():
    with pytest.raises(CfxError):
        EnsembleConfig(threshold=0.0)
    with pytest.raises(CfxError):
        EnsembleConfig(threshold=1.5)


def test_vote_validation():
    with pytest.raises(CfxError, match="at least one"):
        vote([])
    with pytest.raises(DataFormatError):
        vote([1, 2, 0])


def test_monotone_in_votes_and_threshold():
    # flipping any member 0 -> 1 can never lower the decision; raising the
    # threshold can never raise it
    thresholds = [0.2, 1 / 3, 0.5, 0.75, 1.0]
    for votes in itertools.product((0, 1), repeat=5):
        votes = list(votes)
        for cfg_t in thresholds:
            base = vote(votes, EnsembleConfig(cfg_t))
            for i, v in enumerate(votes):
                if v == 0:
                    bumped = votes.copy()
                    bumped[i] = 1
                    assert vote(bumped, EnsembleConfig(cfg_t)) >= base
        decisions = [vote(votes, EnsembleConfig(t)) for t in thresholds]
        assert decisions == sorted(decisions, reverse=True)


def test_permutation_invariance():
    votes = [1, 0, 1, 0, 0]
    expected = vote(votes)
    for perm in itertools.permutations(votes):
        assert vote(list(perm)) == expected


def test_vote_many():
    cols = [[1, 0, 0], [0, 0, 1], [0, 0, 1]]
    assert vote_many(cols) == [1, 0, 1]
    with pytest.raises(CfxError, match="length"):
        vote_many([[1, 0], [1]])
    with pytest.raises(CfxError):
        vote_many([])
