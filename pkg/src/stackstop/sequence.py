"""Object sequences, relative ranks and what Player 2 gets to see.

Moments are 1-based.  Rank 1 is the best object.  ``N + 1`` is the "never"
sentinel for Player 1's acceptance moment.

Random permutations use numpy's PCG64 bit generator with an explicit
Fisher-Yates shuffle, so a given seed produces the same permutation on every
platform and numpy version that keeps PCG64 and ``Generator.integers`` stable.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

RNG_ALGORITHM = "pcg64-fisher-yates-v1"


def _check_permutation(abs_ranks: Sequence[int]) -> tuple[int, ...]:
    ranks = tuple(int(a) for a in abs_ranks)
    if not ranks:
        raise ValueError("a sequence needs at least one object")
    if sorted(ranks) != list(range(1, len(ranks) + 1)):
        raise ValueError("absolute ranks must be a permutation of 1..N")
    return ranks


def relative_ranks(abs_ranks: Sequence[int]) -> tuple[int, ...]:
    """Rank of each object among the objects seen up to and including it."""
    ranks = _check_permutation(abs_ranks)
    seen: list[int] = []
    out = []
    for a in ranks:
        pos = bisect.bisect_left(seen, a)
        seen.insert(pos, a)
        out.append(pos + 1)
    return tuple(out)


@dataclass(frozen=True)
class RankSequence:
    abs_ranks: tuple[int, ...]
    rel_ranks: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "abs_ranks", _check_permutation(self.abs_ranks))
        object.__setattr__(self, "rel_ranks", relative_ranks(self.abs_ranks))

    @property
    def n_objects(self) -> int:
        return len(self.abs_ranks)

    def candidate_moments(self) -> tuple[int, ...]:
        """Moments at which a relatively best object appears."""
        return tuple(n for n, r in enumerate(self.rel_ranks, 1) if r == 1)


@dataclass(frozen=True)
class Player2View:
    p1_accept_moment: int  # N + 1 if Player 1 never accepts
    observed: tuple[int, ...]  # absolute ranks, Player 1's object removed
    observed_moments: tuple[int, ...]  # original moment of each observed object
    p2_candidate_moments: tuple[int, ...]  # original moments of Player 2's candidates

    def candidates_after_p1(self) -> tuple[int, ...]:
        return tuple(n for n in self.p2_candidate_moments if n > self.p1_accept_moment)


def player2_view(seq: RankSequence, p1_rule) -> Player2View:
    """Remove the object Player 1 takes under a threshold rule and list Player 2's candidates.

    ``p1_rule`` is a threshold moment or any object with an ``n_star`` attribute.
    """
    n_star = int(getattr(p1_rule, "n_star", p1_rule))
    N = seq.n_objects
    if not 1 <= n_star <= N + 1:
        raise ValueError("threshold out of range")
    mu0 = next((n for n, r in enumerate(seq.rel_ranks, 1) if n >= n_star and r == 1), N + 1)
    moments = tuple(n for n in range(1, N + 1) if n != mu0)
    observed = tuple(seq.abs_ranks[n - 1] for n in moments)
    best = N + 1
    cands = []
    for n, a in zip(moments, observed):
        if a < best:
            best = a
            cands.append(n)
    return Player2View(mu0, observed, moments, tuple(cands))


def _rng(seed: int, stream: int | None = None) -> np.random.Generator:
    ss = np.random.SeedSequence(seed) if stream is None else np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def fisher_yates_batch(n_objects: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent uniform permutations of 1..N as rows of an int array."""
    perms = np.tile(np.arange(1, n_objects + 1, dtype=np.int16 if n_objects < 32000 else np.int32), (size, 1))
    rows = np.arange(size)
    for i in range(n_objects - 1, 0, -1):
        j = rng.integers(0, i + 1, size=size)
        tmp = perms[rows, j].copy()
        perms[rows, j] = perms[:, i]
        perms[:, i] = tmp
    return perms


def random_permutation(N: int, seed: int) -> RankSequence:
    if N < 1:
        raise ValueError("N must be a positive integer")
    perm = fisher_yates_batch(N, 1, _rng(seed))[0]
    return RankSequence(tuple(int(a) for a in perm))


def rank_classes(perms: np.ndarray) -> np.ndarray:
    """Per-moment class of each object: 1 if relatively best, 2 if second, 0 otherwise."""
    size, N = perms.shape
    out = np.zeros((size, N), dtype=np.int8)
    big = np.iinfo(perms.dtype).max
    best = np.full(size, big, dtype=perms.dtype)
    second = np.full(size, big, dtype=perms.dtype)
    for k in range(N):
        a = perms[:, k]
        is1 = a < best
        is2 = ~is1 & (a < second)
        out[is1, k] = 1
        out[is2, k] = 2
        second = np.where(is1, best, np.where(is2, a, second))
        best = np.where(is1, a, best)
    return out
