"""Ground truth for strategy pairs: exhaustive enumeration and Monte Carlo.

Both engines play the game object by object and hand each player only its
own observations (see :mod:`stackstop.rules`).  Player 1 sees every object;
Player 2 sees every object except the one Player 1 takes.  A player wins if
the object it took is the overall best.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .rules import DecisionRule, Observation, infer_moment, p1_threshold, p2_fixed
from .sequence import RankSequence, _rng, fisher_yates_batch, player2_view, rank_classes

EXHAUSTIVE_LIMIT = 12
OVERRIDE_LIMIT = 13
LITERAL_LIMIT = 8  # above this the permutations are lumped by relative-rank class
BLOCK = 1 << 15


class _Memo:
    """Caches a rule's decisions by candidate history (rules are deterministic)."""

    def __init__(self, rule: DecisionRule, N: int):
        self.rule = rule
        self.N = N
        self.cache: dict[tuple[int, ...], bool] = {}

    def __call__(self, hist: tuple[int, ...]) -> bool:
        hit = self.cache.get(hist)
        if hit is None:
            hit = bool(self.rule.decide(Observation(self.N, hist)))
            self.cache[hist] = hit
        return hit


def play_permutation(abs_ranks, p1, p2) -> tuple[bool, bool]:
    """Play one sequence; returns whether each player ends up with the best object."""
    N = len(abs_ranks)
    d1 = p1 if isinstance(p1, _Memo) else _Memo(p1, N)
    d2 = p2 if isinstance(p2, _Memo) else _Memo(p2, N)
    best = best2 = N + 1
    h1: tuple[int, ...] = ()
    h2: tuple[int, ...] = ()
    got1 = got2 = None
    j = 0
    for k, a in enumerate(abs_ranks, 1):
        if got1 is None and a < best:
            best = a
            h1 += (k,)
            if d1(h1):
                got1 = a
                continue
        best = min(best, a)
        j += 1
        if a < best2:
            best2 = a
            if got2 is None:
                h2 += (j,)
                if d2(h2):
                    got2 = a
    return got1 == 1, got2 == 1


def play_events(events, N: int, d1: _Memo, d2: _Memo) -> tuple[bool, bool]:
    """Same game driven by the moments of relative rank 1 and 2 only.

    ``events`` is a sequence of ``(moment, class)`` with class 1 or 2.
    """
    h1: tuple[int, ...] = ()
    h2: tuple[int, ...] = ()
    done1 = done2 = False
    top1 = top2 = False  # the accepted object is still the best so far
    for k, c in events:
        if c == 1:
            top1 = top2 = False
            if not done1:
                h1 += (k,)
                if d1(h1):
                    done1 = top1 = True
                    continue
        elif not (done1 and top1):
            continue  # rank 2 behind an object Player 2 has seen
        if not done2:
            h2 += (k - 1 if done1 else k,)
            if d2(h2):
                done2 = True
                top2 = c == 1
    return top1, top2


def _lumped(N: int, d1: _Memo, d2: _Memo) -> tuple[Fraction, Fraction]:
    """Exact expectation over all N! orders, grouped by per-moment relative-rank class.

    Relative ranks are independent with P(R_k = i) = 1/k, so summing over
    classes {1, 2, other} with weights 1/k, 1/k, (k-2)/k gives the same
    totals as iterating the permutations.
    """

    @lru_cache(maxsize=None)
    def go(k, h1, done1, top1, h2, done2, top2):
        if done1 and done2:
            f = Fraction(k, N)
            return (f if top1 else Fraction(0), f if top2 else Fraction(0))
        if k == N:
            return Fraction(int(top1)), Fraction(int(top2))
        j = k + 1
        out1 = out2 = Fraction(0)
        for c, w in ((1, Fraction(1, j)), (2, Fraction(1, j) if j >= 2 else 0), (0, Fraction(j - 2, j) if j >= 2 else 0)):
            if w == 0:
                continue
            s = (h1, done1, top1, h2, done2, top2)
            a1, a2 = _step(j, c, s, d1, d2)
            r1, r2 = go(j, *a1) if a2 is None else a2
            out1 += w * r1
            out2 += w * r2
        return out1, out2

    def _step(j, c, s, d1, d2):
        h1, done1, top1, h2, done2, top2 = s
        if c == 0:
            return s, None
        if c == 1:
            top1 = top2 = False
            if not done1:
                h1 = h1 + (j,)
                if d1(h1):
                    return (h1, True, True, h2, done2, top2), None
        elif not (done1 and top1):
            return s, None
        if not done2:
            h2 = h2 + (j - 1 if done1 else j,)
            if d2(h2):
                done2, top2 = True, c == 1
        return (h1, done1, top1, h2, done2, top2), None

    return go(0, (), False, False, (), False, False)


def enumerate_exact(N: int, p1: DecisionRule, p2: DecisionRule, method: str = "auto",
                    allow_large: bool = False) -> tuple[Fraction, Fraction]:
    """Exact success probabilities (u1, u2) over all N! equally likely orders."""
    limit = OVERRIDE_LIMIT if allow_large else EXHAUSTIVE_LIMIT
    if not 1 <= N <= limit:
        raise ValueError(f"exhaustive evaluation supports 1 <= N <= {limit}, got {N}")
    if method == "auto":
        method = "literal" if N <= LITERAL_LIMIT else "lumped"
    d1, d2 = _Memo(p1, N), _Memo(p2, N)
    if method == "lumped":
        return _lumped(N, d1, d2)
    if method != "literal":
        raise ValueError(f"unknown method {method!r}")
    wins1 = wins2 = 0
    for perm in itertools.permutations(range(1, N + 1)):
        a, b = play_permutation(perm, d1, d2)
        wins1 += a
        wins2 += b
    total = math.factorial(N)
    return Fraction(wins1, total), Fraction(wins2, total)


def table1_rows(N: int = 4) -> list[dict]:
    """Every order of N objects with Player 1's pick, Player 2's later candidates
    and Player 2's payoff under the three simple strategies."""
    from .classical import p1_threshold_index

    ns = p1_threshold_index(N)
    p1 = _Memo(p1_threshold(ns), N)
    rules = {k: _Memo(p2_fixed(k, N, ns), N) for k in ("pi1", "pi2", "pi3")}
    rows = []
    for perm in itertools.permutations(range(1, N + 1)):
        view = player2_view(RankSequence(perm), ns)
        after = view.candidates_after_p1()
        marks = []
        for n, a in enumerate(perm, 1):
            if n == view.p1_accept_moment:
                marks.append(f"{a}^0")
            elif n in after:
                marks.append(f"{a}^{after.index(n) + 1}")
            else:
                marks.append(str(a))
        row = {"sequence": marks}
        for k, d in rules.items():
            row[k] = int(play_permutation(perm, p1, d)[1])
        rows.append(row)
    return rows


@dataclass(frozen=True)
class SimReport:
    n_objects: int
    trials: int
    successes: int  # Player 2
    estimate: float
    std_error: float
    seed: int
    p1_successes: int
    p1_estimate: float
    p1_std_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def _std_error(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def _blocks(trials: int) -> list[int]:
    full, rest = divmod(trials, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def _worker_count(shards: int) -> int:
    cap = os.environ.get("STACKSTOP_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(shards, limit))


def _run_block(N, size, seed, b, d1, d2):
    classes = rank_classes(fisher_yates_batch(N, size, _rng(seed, b)))
    rows, cols = np.nonzero(classes)
    cls = classes[rows, cols].tolist()
    moments = (cols + 1).tolist()
    bounds = np.searchsorted(rows, np.arange(size + 1)).tolist()
    s1 = s2 = 0
    for i in range(size):
        lo, hi = bounds[i], bounds[i + 1]
        a, b2 = play_events(zip(moments[lo:hi], cls[lo:hi]), N, d1, d2)
        s1 += a
        s2 += b2
    return s1, s2


def simulate(N: int, p1: DecisionRule, p2: DecisionRule, trials: int, seed: int = 0, shards: int = 1) -> SimReport:
    """Monte Carlo over uniformly random orders.

    Trials are cut into fixed-size blocks, each with its own derived seed, so
    the result does not depend on how blocks are spread over shards.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if N < 1:
        raise ValueError("N must be a positive integer")
    if shards < 1:
        raise ValueError("shards must be >= 1")
    d1, d2 = _Memo(p1, N), _Memo(p2, N)
    sizes = _blocks(trials)
    groups = [list(range(s, len(sizes), shards)) for s in range(shards)]

    def run_shard(blocks):
        t1 = t2 = 0
        for b in blocks:
            a, c = _run_block(N, sizes[b], seed, b, d1, d2)
            t1 += a
            t2 += c
        return t1, t2

    workers = _worker_count(shards)
    if workers == 1:
        parts = [run_shard(g) for g in groups]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_shard, groups))
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    e1, e2 = s1 / trials, s2 / trials
    return SimReport(N, trials, s2, e2, _std_error(e2, trials), seed, s1, e1, _std_error(e1, trials))


@dataclass(frozen=True)
class InferenceReport:
    n_objects: int
    sequences: int
    decision_points: int
    violations: int


def _check_inference(seq: RankSequence, n_star: int) -> tuple[int, int]:
    view = player2_view(seq, n_star)
    cands = set(view.p2_candidate_moments)
    points = bad = 0
    for j, moment in enumerate(view.observed_moments, 1):
        if moment not in cands:
            continue
        points += 1
        if infer_moment(j, n_star) != (moment, view.p1_accept_moment < moment):
            bad += 1
    return points, bad


def verify_candidate_inference(N: int, trials: int | None = None, seed: int = 0) -> InferenceReport:
    """Check that Player 2 recovers the true moment and Player 1's status at
    each of his candidates.  ``trials=None`` checks every order."""
    from .classical import p1_threshold_index

    ns = p1_threshold_index(N)
    if trials is None:
        if N > 9:
            raise ValueError("exhaustive inference check is limited to N <= 9")
        seqs = (RankSequence(p) for p in itertools.permutations(range(1, N + 1)))
    else:
        perms = np.concatenate([fisher_yates_batch(N, s, _rng(seed, b)) for b, s in enumerate(_blocks(trials))])
        seqs = (RankSequence(tuple(int(a) for a in row)) for row in perms)
    count = points = bad = 0
    for seq in seqs:
        p, b = _check_inference(seq, ns)
        count += 1
        points += p
        bad += b
    return InferenceReport(N, count, points, bad)


@dataclass(frozen=True)
class CalibrationReport:
    n_objects: int
    history: tuple[int, ...]
    trials: int
    matches: int
    rank_one: int
    frequency: float
    std_error: float
    posterior: float


def posterior_calibration(N: int, history: tuple[int, ...], trials: int, seed: int = 0) -> CalibrationReport:
    """Empirical frequency that Player 2's candidate is relatively best, given
    the moments of his candidates after Player 1's threshold."""
    from .classical import p1_threshold_index
    from .posterior import posterior_from_history

    ns = p1_threshold_index(N)
    history = tuple(history)
    m = len(history)
    if m == 0 or any(b <= a for a, b in zip(history, history[1:])) or history[0] <= ns or history[-1] > N:
        raise ValueError("history must be increasing moments in (n_star, N]")
    # expected[i] is the moment of the (i+1)-th candidate; -1 once past the history
    expected = np.array(list(history) + [-1])
    matches = hits = 0
    for b, size in enumerate(_blocks(trials)):
        classes = rank_classes(fisher_yates_batch(N, size, _rng(seed, b)))
        p1_done = np.zeros(size, bool)
        top = np.zeros(size, bool)
        count = np.zeros(size, np.int64)
        ok = np.ones(size, bool)
        for k in range(ns, history[-1] + 1):
            c = classes[:, k - 1]
            accept = ~p1_done & (c == 1)
            is_cand = p1_done & ((c == 1) | ((c == 2) & top))
            top = np.where(c == 1, accept, top)
            p1_done |= accept
            # a candidate exactly where the history puts the next one, and nowhere else
            ok &= is_cand == (expected[np.minimum(count, m)] == k)
            count += is_cand
        sel = ok & (count == m)
        matches += int(sel.sum())
        hits += int((sel & (classes[:, history[-1] - 1] == 1)).sum())
    freq = hits / matches if matches else float("nan")
    return CalibrationReport(
        N, history, trials, matches, hits, freq,
        _std_error(freq, matches) if matches else float("nan"),
        float(posterior_from_history(history, n_star=ns)),
    )
