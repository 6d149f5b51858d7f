"""Explicit ballot transformations.

``cfat_expand`` materialises the coin-flip split and exists to check
:func:`pamsac.loads.cfat_objective`; ``kpt_expand`` turns a score ballot into
approval parts and is used by the score variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .core import ApprovalBallot, ApprovalProfile, GuardExceeded, ScoreBallot, ScoreProfile, normalize

EXPANSION_GUARD = 16


@dataclass(frozen=True)
class ExpandedProfile:
    ballots: tuple
    provenance: tuple  # per expanded ballot: (source index, subset or part number)

    @property
    def total_weight(self) -> Fraction:
        return sum((b.weight for b in self.ballots), Fraction(0))

    def as_profile(self, roster) -> ApprovalProfile:
        return ApprovalProfile(tuple(roster), self.ballots)


def _subsets(items: tuple):
    for size in range(len(items), -1, -1):
        yield from combinations(items, size)


def cfat_expand(
    ballot: ApprovalBallot,
    restrict_to: Iterable | None = None,
    guard: int = EXPANSION_GUARD,
    source: int = 0,
) -> ExpandedProfile:
    """Split ``ballot`` into 2^t equal parts, one per subset of its t approvals
    inside ``restrict_to``.  Approvals outside ``restrict_to`` stay on every part."""
    approved = ballot.approved
    inside = approved if restrict_to is None else approved & frozenset(restrict_to)
    if len(inside) > guard:
        raise GuardExceeded(f"ballot has {len(inside)} in-set approvals (guard {guard})")
    outside = approved - inside
    ordered = tuple(sorted(inside))
    weight = ballot.weight / (2 ** len(ordered))
    ballots = []
    provenance = []
    for subset in _subsets(ordered):
        kept = frozenset(subset)
        ballots.append(ApprovalBallot(weight, kept | outside))
        provenance.append((source, kept))
    return ExpandedProfile(tuple(ballots), tuple(provenance))


def cfat_expand_profile(
    profile: ApprovalProfile, restrict_to: Iterable | None = None, guard: int = EXPANSION_GUARD
) -> ExpandedProfile:
    ballots = []
    provenance = []
    for i, b in enumerate(profile.ballots):
        part = cfat_expand(b, restrict_to, guard, source=i)
        ballots.extend(part.ballots)
        provenance.extend(part.provenance)
    return ExpandedProfile(tuple(ballots), tuple(provenance))


def kpt_expand(ballot: ScoreBallot, max_score: int, source: int = 0) -> ExpandedProfile:
    """Split a score ballot into ``max_score`` parts; part p approves every
    candidate scored p or more."""
    if max_score < 1:
        raise ValueError("max score must be >= 1")
    weight = ballot.weight / max_score
    scores = dict(ballot.scores)
    ballots = tuple(
        ApprovalBallot(weight, frozenset(c for c, s in scores.items() if s >= part))
        for part in range(1, max_score + 1)
    )
    provenance = tuple((source, part) for part in range(1, max_score + 1))
    return ExpandedProfile(ballots, provenance)


def kpt_expand_profile(profile: ScoreProfile) -> ApprovalProfile:
    ballots = []
    for i, b in enumerate(profile.ballots):
        ballots.extend(kpt_expand(b, profile.max_score, source=i).ballots)
    return normalize(ApprovalProfile(profile.roster, tuple(ballots)))
