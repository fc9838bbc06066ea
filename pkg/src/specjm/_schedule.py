"""Deterministic round-robin pivot schedule for cyclic Jacobi sweeps.

One sweep visits every unordered index pair exactly once.  The pairs are
grouped into rounds of pairwise-disjoint pivots (the classic tournament
rotation), so all rotations within a round act on disjoint rows/columns and
commute exactly.  Both eigensolver backends follow this same schedule, which
makes the sweep order — and hence the result — reproducible.
"""

from __future__ import annotations

from functools import lru_cache


@lru_cache(maxsize=None)
def round_robin_rounds(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Return the rounds of a sweep for matrix dimension ``n``.

    Each round is a tuple of (p, q) pairs with p < q, all indices distinct
    within the round; the union over rounds is every pair exactly once.
    """
    if n < 2:
        return ()
    players = list(range(n))
    if n % 2 == 1:
        players.append(-1)  # bye slot, pairs touching it are skipped
    m = len(players)
    rounds = []
    order = players[1:]
    for _ in range(m - 1):
        seats = [players[0]] + order
        pairs = []
        for i in range(m // 2):
            a, b = seats[i], seats[m - 1 - i]
            if a != -1 and b != -1:
                pairs.append((a, b) if a < b else (b, a))
        rounds.append(tuple(sorted(pairs)))
        order = order[-1:] + order[:-1]
    return tuple(rounds)
