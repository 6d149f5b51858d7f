"""Rival approval-based methods and party-list apportionment.

Every committee method here is exhaustive over candidate sets (up to clone
symmetry) with exact rational scores.  Ties in score go to the
lexicographically smallest set under roster order, except Ebert's method,
which shares the PAMSAC tie-break chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Callable, Mapping

from .committees import clone_classes, committees, lex_key, select
from .core import ApprovalProfile, ElectionConfig, ElectionResult, as_fraction
from .tally import tally

DEFAULT_GUARD = 10**7


def _column(profile: ApprovalProfile):
    return lambda c: tuple(c in b.approved for b in profile.ballots)


def _best_set(profile: ApprovalProfile, seats: int, score: Callable, method: str, maximize=True, guard=DEFAULT_GUARD):
    if seats > len(profile.roster):
        raise ValueError("more seats than candidates")
    index = {c: i for i, c in enumerate(profile.roster)}
    classes = clone_classes(profile.roster, profile.roster, _column(profile))
    entries = []
    for committee, mult in committees(classes, seats, guard):
        value = score(committee)
        entries.append(((-value if maximize else value,), lex_key(index, committee), mult, (committee, value)))
    (committee, value), trace = select(entries, ("score",))
    return ElectionResult(method, committee, value, None, trace)


def all_scores(profile: ApprovalProfile, seats: int, score: Callable) -> dict:
    """Score of every candidate set; for tests and reports."""
    return {w: score(w) for w in combinations(profile.roster, seats)}


# satisfaction approval voting

def sav_score(profile: ApprovalProfile, committee) -> Fraction:
    members = frozenset(committee)
    total = Fraction(0)
    for b in profile.ballots:
        if b.approved:
            total += b.weight * Fraction(len(b.approved & members), len(b.approved))
    return total


def sav_tally(profile: ApprovalProfile, seats: int) -> ElectionResult:
    """Maximise the summed share of each ballot's approvals that get elected."""
    return _best_set(profile, seats, lambda w: sav_score(profile, w), "sav")


# proportional approval voting

PAV_VARIANTS = ("dhondt", "sainte_lague")


def pav_satisfaction(n: int, variant: str = "dhondt") -> Fraction:
    """``1 + 1/2 + ... + 1/n``, or ``1 + 1/3 + ... + 1/(2n-1)`` for Sainte-Laguë."""
    if variant == "dhondt":
        return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))
    if variant == "sainte_lague":
        return sum((Fraction(1, 2 * j - 1) for j in range(1, n + 1)), Fraction(0))
    raise ValueError(f"unknown PAV variant {variant!r}")


def pav_score(profile: ApprovalProfile, committee, variant: str = "dhondt") -> Fraction:
    members = frozenset(committee)
    table = [pav_satisfaction(n, variant) for n in range(len(members) + 1)]
    return sum((b.weight * table[len(b.approved & members)] for b in profile.ballots), Fraction(0))


def pav_tally(profile: ApprovalProfile, seats: int, variant: str = "dhondt") -> ElectionResult:
    if variant not in PAV_VARIANTS:
        raise ValueError(f"unknown PAV variant {variant!r}")
    name = "pav-dhondt" if variant == "dhondt" else "pav-sl"
    return _best_set(profile, seats, lambda w: pav_score(profile, w, variant), name)


# Chamberlin-Courant and Monroe

def cc_score(profile: ApprovalProfile, committee) -> Fraction:
    members = frozenset(committee)
    return sum((b.weight for b in profile.ballots if b.approved & members), Fraction(0))


def cc_tally(profile: ApprovalProfile, seats: int) -> ElectionResult:
    """Maximise the weight of ballots approving at least one elected candidate."""
    return _best_set(profile, seats, lambda w: cc_score(profile, w), "cc")


@dataclass(frozen=True)
class Assignment:
    per_ballot: tuple  # (ballot index, candidate or None, weight)
    capacities: dict  # candidate -> capacity

    @property
    def assigned(self) -> Fraction:
        return sum((w for _, c, w in self.per_ballot if c is not None), Fraction(0))


def monroe_assignment(profile: ApprovalProfile, committee) -> Assignment:
    """Largest weight of voters that can be matched to an approved member when
    every member represents exactly ``total weight / seats`` voters.

    Ballots may be split, so this is a transportation problem; it is solved as
    an integer maximum flow after scaling all weights to integers.
    """
    import networkx as nx

    committee = tuple(committee)
    total = profile.total_weight
    cap = total / len(committee)
    scale = lcm(cap.denominator, *(b.weight.denominator for b in profile.ballots))
    g = nx.DiGraph()
    for i, b in enumerate(profile.ballots):
        g.add_edge("s", ("b", i), capacity=int(b.weight * scale))
        for c in committee:
            if c in b.approved:
                g.add_edge(("b", i), ("c", c), capacity=int(b.weight * scale))
    for c in committee:
        g.add_edge(("c", c), "t", capacity=int(cap * scale))
    _, flow = nx.maximum_flow(g, "s", "t")
    rows = []
    for i, b in enumerate(profile.ballots):
        used = Fraction(0)
        for c in committee:
            amount = flow.get(("b", i), {}).get(("c", c), 0)
            if amount:
                rows.append((i, c, Fraction(amount, scale)))
                used += Fraction(amount, scale)
        if used < b.weight:
            rows.append((i, None, b.weight - used))
    return Assignment(tuple(rows), {c: cap for c in committee})


def monroe_score(profile: ApprovalProfile, committee) -> Fraction:
    return monroe_assignment(profile, committee).assigned


def monroe_tally(profile: ApprovalProfile, seats: int) -> ElectionResult:
    return _best_set(profile, seats, lambda w: monroe_score(profile, w), "monroe")


# Ebert

def ebert_tally(profile: ApprovalProfile, seats: int) -> ElectionResult:
    """Minimise the raw squared-load sum: no removal and no coin-flip split.

    Equal objectives are separated by the same approval totals as PAMSAC.
    """
    return tally(profile, ElectionConfig(seats, Fraction(0), "none"), method="ebert")


# Minimax

def hamming(a, b) -> int:
    return len(frozenset(a) ^ frozenset(b))


def minimax_weights(profile: ApprovalProfile) -> tuple:
    """Per-ballot proximity weights and whether the unweighted fallback applies.

    A ballot's weight is its voter weight divided by its weighted mean Hamming
    distance to all ballots, itself included.
    """
    total = profile.total_weight
    means = []
    for a in profile.ballots:
        d = sum((b.weight * hamming(a.approved, b.approved) for b in profile.ballots), Fraction(0))
        means.append(d / total)
    if any(m == 0 for m in means):
        return tuple(Fraction(1) for _ in means), True
    return tuple(b.weight / m for b, m in zip(profile.ballots, means)), False


def minimax_score(profile: ApprovalProfile, committee, weights=None) -> Fraction:
    if weights is None:
        weights, _ = minimax_weights(profile)
    return max(w * hamming(b.approved, committee) for w, b in zip(weights, profile.ballots))


def minimax_tally(profile: ApprovalProfile, seats: int) -> ElectionResult:
    weights, fallback = minimax_weights(profile)
    result = _best_set(
        profile, seats, lambda w: minimax_score(profile, w, weights), "minimax", maximize=False
    )
    if fallback:
        result = ElectionResult(
            result.method, result.winners, result.score, None, result.tie_trace, ("unweighted Hamming fallback",)
        )
    return result


# party-list apportionment

@dataclass(frozen=True)
class Apportionment:
    """Seat allocation with an exact-tie report.

    ``tied`` lists the parties holding a quotient equal to the last winning
    quotient when more such quotients exist than seats left for them;
    ``contested`` is the number of those seats.  Empty when the allocation is
    forced.
    """

    seats: dict  # party -> seats
    threshold: Fraction
    tied: tuple = ()
    contested: int = 0
    holders: tuple = ()  # tied parties whose last seat came at the threshold

    def alternatives(self) -> list:
        """Every allocation the exact tie allows, the reported one included."""
        if not self.tied:
            return [dict(self.seats)]
        base = dict(self.seats)
        for p in self.holders:
            base[p] -= 1
        out = []
        for chosen in combinations(self.tied, self.contested):
            alloc = dict(base)
            for p in chosen:
                alloc[p] += 1
            out.append(alloc)
        return out


def _apportion(votes: Mapping, seats: int, divisor: Callable) -> Apportionment:
    votes = {p: as_fraction(v) for p, v in votes.items()}
    if any(v <= 0 for v in votes.values()):
        raise ValueError("party weights must be positive")
    if seats < 0:
        raise ValueError("seats must be >= 0")
    order = sorted(votes)
    rank = {p: i for i, p in enumerate(order)}
    alloc = {p: 0 for p in order}
    threshold = None
    for _ in range(seats):
        best = max(order, key=lambda p: (votes[p] / divisor(alloc[p]), -rank[p]))
        threshold = votes[best] / divisor(alloc[best])
        alloc[best] += 1
    if threshold is None:
        return Apportionment(alloc, Fraction(0))
    holders = tuple(p for p in order if alloc[p] and votes[p] / divisor(alloc[p] - 1) == threshold)
    waiting = tuple(p for p in order if votes[p] / divisor(alloc[p]) == threshold)
    if not waiting:
        return Apportionment(alloc, threshold)
    tied = tuple(p for p in order if p in holders or p in waiting)
    return Apportionment(alloc, threshold, tied, len(holders), holders)


def dhondt_apportion(votes: Mapping, seats: int) -> Apportionment:
    """Highest averages with divisors 1, 2, 3, ...; exact ties go to the party
    that sorts first."""
    return _apportion(votes, seats, lambda n: n + 1)


def sainte_lague_apportion(votes: Mapping, seats: int) -> Apportionment:
    """Highest averages with divisors 1, 3, 5, ..."""
    return _apportion(votes, seats, lambda n: 2 * n + 1)
