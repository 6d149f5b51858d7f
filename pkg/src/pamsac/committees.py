"""Committee enumeration up to clone symmetry.

Two candidates with identical ballot columns (every ballot treats them the same
way) are interchangeable for every method here, so a committee is determined
by how many members it takes from each clone class.  Each count vector is
represented by its lexicographically smallest member, which is also the
committee the final lexicographic tie-break would pick among its clones.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, prod
from typing import Callable, Iterable, Iterator, Sequence

from .core import GuardExceeded


@dataclass(frozen=True)
class CloneClasses:
    roster: tuple
    classes: tuple  # tuple of tuples of candidates, each in roster order

    def count(self, seats: int) -> int:
        """Number of count vectors (canonical committees) of size ``seats``."""
        sizes = [len(c) for c in self.classes]
        ways = [1] + [0] * seats
        for n in sizes:
            nxt = [0] * (seats + 1)
            for s, w in enumerate(ways):
                if w:
                    for k in range(min(n, seats - s) + 1):
                        nxt[s + k] += w
            ways = nxt
        return ways[seats]


def clone_classes(roster: Sequence, pool: Iterable, column: Callable) -> CloneClasses:
    """Group ``pool`` by ``column(candidate)``; classes ordered by first member."""
    pool = set(pool)
    groups: dict = {}
    for c in roster:
        if c in pool:
            groups.setdefault(column(c), []).append(c)
    classes = sorted((tuple(g) for g in groups.values()), key=lambda g: roster.index(g[0]))
    return CloneClasses(tuple(roster), tuple(classes))


def committees(classes: CloneClasses, seats: int, guard: int | None = None) -> Iterator:
    """Yield ``(committee, multiplicity)`` with committees in roster order."""
    if guard is not None and classes.count(seats) > guard:
        raise GuardExceeded(f"more than {guard} candidate sets to enumerate")
    order = {c: i for i, c in enumerate(classes.roster)}
    groups = classes.classes
    remaining = [0] * (len(groups) + 1)
    for i in range(len(groups) - 1, -1, -1):
        remaining[i] = remaining[i + 1] + len(groups[i])

    def rec(i, left, counts):
        if left == 0:
            members = [c for g, k in zip(groups, counts) for c in g[:k]]
            members.sort(key=order.__getitem__)
            mult = prod(comb(len(g), k) for g, k in zip(groups, counts))
            yield tuple(members), mult
            return
        if i == len(groups) or remaining[i] < left:
            return
        for k in range(min(left, len(groups[i])), -1, -1):
            yield from rec(i + 1, left - k, counts + [k])

    yield from rec(0, seats, [])


def lex_key(roster_index: dict, committee: Sequence) -> tuple:
    return tuple(sorted(roster_index[c] for c in committee))


def select(entries: list, levels: Sequence[str]) -> tuple:
    """Pick the best entry under a level-by-level minimisation.

    ``entries`` holds ``(keys, lexkey, multiplicity, payload)`` where ``keys`` has
    one comparable value per name in ``levels`` (smaller is better).  Returns
    ``(payload, trace)`` where ``trace`` lists ``(level, surviving sets)`` and
    ends with the lexicographic level.
    """
    if not entries:
        raise ValueError("no entries to select from")
    survivors = entries
    trace = []
    for depth, name in enumerate(levels):
        best = min(e[0][depth] for e in survivors)
        survivors = [e for e in survivors if e[0][depth] == best]
        trace.append((name, sum(e[2] for e in survivors)))
    winner = min(survivors, key=lambda e: e[1])
    trace.append(("lexicographic", 1))
    return winner[3], tuple(trace)
