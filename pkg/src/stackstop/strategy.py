"""A-priori description of Player 2's optimal strategy.

The optimal rule is online (accept iff the posterior reaches ``q_n``), but it
can be unrolled into per-candidate clauses: for the m-th candidate seen after
the threshold, the set of moments at which it is accepted, possibly
depending on when the earlier candidates appeared.
"""

from __future__ import annotations

from fractions import Fraction

from .posterior import update_posterior
from .response import Clause, GameSolution

_ORDINALS = ("first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth")

# Cap on the number of rejected histories kept while unrolling.
NODE_BUDGET = 200_000


def ordinal(m: int) -> str:
    return _ORDINALS[m - 1] if 1 <= m <= len(_ORDINALS) else f"{m}th"


def _describe_prefixes(m: int, n_star: int, prefixes: list[tuple[int, ...]], reachable: list[tuple[int, ...]]) -> str:
    # For the second candidate the condition is on the first moment only; try
    # to express it as an interval "before moment c".
    if m == 2:
        firsts = sorted(h[0] for h in prefixes)
        allowed = sorted(h[0] for h in reachable)
        cut = firsts[-1] + 1
        if firsts == [a for a in allowed if a < cut]:
            return f"the first candidate seen after moment {n_star} was seen before moment {cut}"
        return f"the first candidate seen after moment {n_star} was seen at a moment in {{{', '.join(map(str, firsts))}}}"
    shown = ", ".join("(" + ", ".join(map(str, h)) + ")" for h in sorted(prefixes))
    return f"the earlier candidates appeared at moments {shown}"


def _pre_clause(sol: GameSolution) -> Clause:
    n0, last = sol.n0, sol.n_star - 1
    if n0 == 1 and last <= 1:
        text = "accept the first object"
    elif n0 == last:
        text = f"accept a candidate at moment {n0}"
    elif n0 < last:
        text = f"accept a candidate if {n0} <= n <= {last}"
    else:
        text = f"reject every candidate before moment {sol.n_star}"
    return Clause(index=None, text=text, from_moment=n0 if n0 <= last else None)


def a_priori_strategy(sol: GameSolution, max_index: int | None = None, budget: int = NODE_BUDGET) -> list[Clause]:
    """Unroll the online rule into clauses, one per candidate index.

    ``max_index`` defaults to the index from which the near-optimal rule
    always accepts; later candidates are covered by the online rule.
    """
    N, ns = sol.n_objects, sol.n_star
    clauses = [_pre_clause(sol)]
    if sol.n0 == 1:
        return clauses  # the first object is always taken
    if max_index is None:
        from .near_optimal import solve_near_optimal

        max_index = solve_near_optimal(N, exact=sol.exact).m0
    half = Fraction(1, 2) if sol.exact else 0.5
    frontier: list[tuple[tuple[int, ...], object]] = [((), None)]
    m = 0
    while frontier and m < max_index:
        m += 1
        accepted: dict[int, list] = {}
        rejected: dict[int, list] = {}
        nxt = []
        for hist, p_prev in frontier:
            start = hist[-1] + 1 if hist else ns + 1
            for n in range(start, N + 1):
                p = half if not hist else update_posterior(hist[-1], n, p_prev)
                if sol.accepts(n, p):
                    accepted.setdefault(n, []).append(hist)
                else:
                    rejected.setdefault(n, []).append(hist)
                    nxt.append((hist + (n,), p))
        moments = sorted(set(accepted) | set(rejected))
        if not moments:
            break
        # from this moment on every reachable history is accepted
        n_all = N + 1
        for n in reversed(moments):
            if rejected.get(n):
                break
            n_all = n
        conditional = {n: tuple(sorted(accepted[n])) for n in moments if n < n_all and accepted.get(n)}
        head = f"accept the {ordinal(m)} candidate seen after moment {ns}"
        if n_all == moments[0]:
            text = f"always {head}"
        else:
            parts = [f"n >= {n_all}"] if n_all <= N else []
            for n, prefixes in conditional.items():
                reach = sorted(accepted[n] + rejected.get(n, []))
                parts.append(f"n = {n} and {_describe_prefixes(m, ns, list(prefixes), reach)}")
            text = f"{head} if " + (", or ".join(parts) if parts else "never")
        clauses.append(Clause(index=m, text=text, from_moment=n_all if n_all <= N else None, conditional=conditional))
        frontier = nxt
        if len(frontier) > budget:
            break
    if frontier:
        clauses.append(Clause(
            index=m + 1,
            text=f"for the {ordinal(m + 1)} and later candidates, accept at moment n iff the posterior is at least q_n",
        ))
    return clauses
