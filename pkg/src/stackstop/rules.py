"""Decision rules for both players.

A rule sees only its own player's observations: the number of objects and
the positions, within that player's own stream, of the candidates seen so
far.  The last entry is the candidate currently on offer.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction

from .near_optimal import NearOptimalSolution
from .posterior import update_posterior
from .response import GameSolution


@dataclass(frozen=True)
class Observation:
    n_objects: int
    candidates: tuple[int, ...]  # stream positions of this player's candidates

    @property
    def index(self) -> int:
        return self.candidates[-1]


def infer_moment(index: int, n_star: int) -> tuple[int, bool]:
    """Original moment of Player 2's ``index``-th object and whether Player 1 has accepted.

    Valid at Player 2's decision points when Player 1 plays the threshold
    rule with threshold ``n_star``: before the threshold nothing has been
    removed, and a candidate at or after it cannot coexist with a searching
    Player 1.
    """
    if index < n_star:
        return index, False
    return index + 1, True


class DecisionRule(ABC):
    name = "rule"

    @abstractmethod
    def decide(self, obs: Observation) -> bool:
        """True to accept the current candidate."""

    def __repr__(self):
        return self.name


class ThresholdP1(DecisionRule):
    """Accept the first relatively best object from moment ``n_star`` on."""

    def __init__(self, n_star: int):
        self.n_star = n_star
        self.name = f"p1_threshold({n_star})"

    def decide(self, obs):
        return obs.index >= self.n_star


def p1_threshold(n_star: int) -> ThresholdP1:
    return ThresholdP1(n_star)


class ThresholdP2(DecisionRule):
    """Accept the first candidate whose inferred moment is at least ``tau``."""

    def __init__(self, tau: int, n_star: int):
        self.tau = tau
        self.n_star = n_star
        self.name = f"p2_threshold({tau})"

    def decide(self, obs):
        n, _ = infer_moment(obs.index, self.n_star)
        return n >= self.tau


def p2_threshold(tau: int, n_star: int) -> ThresholdP2:
    return ThresholdP2(tau, n_star)


def p2_fixed(kind: str, N: int, n_star: int) -> ThresholdP2:
    """The simple strategies: ``pi1`` accept the first object, ``pi2`` accept the
    first candidate after the threshold, ``pi3`` accept a candidate only at the last moment."""
    taus = {"pi1": 1, "pi2": n_star + 1, "pi3": N}
    if kind not in taus:
        raise ValueError(f"unknown fixed strategy {kind!r}")
    rule = ThresholdP2(taus[kind], n_star)
    rule.name = kind
    return rule


class OptimalP2(DecisionRule):
    """Best response: accept from ``n0`` before the threshold, afterwards iff the posterior reaches q_n."""

    name = "p2_optimal"

    def __init__(self, sol: GameSolution):
        self.sol = sol
        self.half = Fraction(1, 2) if sol.exact else 0.5

    def posterior(self, moments: tuple[int, ...]):
        p = self.half
        for a, b in zip(moments, moments[1:]):
            p = update_posterior(a, b, p)
        return p

    def decide(self, obs):
        ns = self.sol.n_star
        n, p1_done = infer_moment(obs.index, ns)
        if not p1_done:
            return n >= self.sol.n0
        history = tuple(j + 1 for j in obs.candidates if j >= ns)
        return self.sol.accepts(n, self.posterior(history))


def p2_optimal(sol: GameSolution) -> OptimalP2:
    return OptimalP2(sol)


class NearOptimalP2(DecisionRule):
    """Count rule: accept the m-th candidate after the threshold iff its moment is at least n_m."""

    name = "p2_near_optimal"

    def __init__(self, sol: NearOptimalSolution):
        self.sol = sol

    def decide(self, obs):
        ns = self.sol.n_star
        n, p1_done = infer_moment(obs.index, ns)
        if not p1_done:
            return n >= self.sol.n0_a
        m = sum(1 for j in obs.candidates if j >= ns)
        return self.sol.accepts(n, m)


def p2_near_optimal(sol: NearOptimalSolution) -> NearOptimalP2:
    return NearOptimalP2(sol)


class NeverAccept(DecisionRule):
    name = "never"

    def decide(self, obs):
        return False
