import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackstop.sequence import (
    RankSequence,
    _rng,
    fisher_yates_batch,
    player2_view,
    random_permutation,
    rank_classes,
    relative_ranks,
)


@pytest.mark.parametrize("seq, expected", [
    ((1, 2, 3, 4), (1, 2, 3, 4)),
    ((4, 3, 2, 1), (1, 1, 1, 1)),
    ((3, 2, 4, 1), (1, 1, 3, 1)),
])
def test_relative_ranks_examples(seq, expected):
    assert relative_ranks(seq) == expected


@pytest.mark.parametrize("bad", [(), (1, 1), (0, 1), (1, 3)])
def test_relative_ranks_rejects_non_permutations(bad):
    with pytest.raises(ValueError):
        relative_ranks(bad)


@given(st.permutations(list(range(1, 12))))
def test_relative_ranks_match_brute_force(perm):
    brute = tuple(sum(b <= a for b in perm[: i + 1]) for i, a in enumerate(perm))
    assert relative_ranks(perm) == brute


def test_player2_view_examples():
    v = player2_view(RankSequence((3, 2, 4, 1)), 2)
    assert v.p1_accept_moment == 2
    assert v.candidates_after_p1() == (4,)

    v = player2_view(RankSequence((1, 2, 3, 4)), 2)
    assert v.p1_accept_moment == 5
    assert v.observed == (1, 2, 3, 4)

    v = player2_view(RankSequence((4, 3, 2, 1)), 2)
    assert v.p1_accept_moment == 2
    assert v.candidates_after_p1() == (3, 4)


def test_player2_view_accepts_rule_objects():
    from stackstop.rules import p1_threshold

    seq = RankSequence((2, 4, 1, 3, 5))
    assert player2_view(seq, p1_threshold(3)) == player2_view(seq, 3)


def test_random_permutation_is_deterministic():
    assert random_permutation(1, 5).abs_ranks == (1,)
    assert random_permutation(30, 9) == random_permutation(30, 9)
    assert random_permutation(30, 9) != random_permutation(30, 10)


def test_fisher_yates_rows_are_permutations():
    perms = fisher_yates_batch(9, 500, _rng(1))
    assert (np.sort(perms, axis=1) == np.arange(1, 10)).all()


def test_relative_rank_frequencies():
    # P(R_3 = 1) = 1/3 for N = 5
    size = 1_000_000
    perms = fisher_yates_batch(5, size, _rng(123))
    first3 = perms[:, :3]
    hits = (first3[:, 2] == first3.min(axis=1)).mean()
    sigma = (1 / 3 * 2 / 3 / size) ** 0.5
    assert abs(hits - 1 / 3) <= 4 * sigma


def test_uniform_position_distribution():
    perms = fisher_yates_batch(6, 60_000, _rng(5))
    counts = np.array([(perms[:, i] == 1).sum() for i in range(6)])
    expected = 10_000
    assert abs(counts - expected).max() <= 4 * (expected * 5 / 6) ** 0.5


@settings(max_examples=50)
@given(st.integers(2, 15), st.integers(0, 2**32))
def test_rank_classes_match_relative_ranks(N, seed):
    perms = fisher_yates_batch(N, 20, _rng(seed))
    classes = rank_classes(perms)
    for row, cls in zip(perms, classes):
        rel = relative_ranks(tuple(int(a) for a in row))
        assert tuple(int(c) for c in cls) == tuple(r if r <= 2 else 0 for r in rel)
