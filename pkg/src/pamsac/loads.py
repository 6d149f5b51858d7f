"""Squared-load objectives.

Every elected candidate carries a unit load shared equally by its approvers.
``ebert_sum_squared`` is the raw objective, ``variance_objective`` its
mean-centred twin, and ``cfat_objective`` the value the raw objective takes on
the coin-flip-transformed profile, computed without expanding it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import ApprovalProfile, IneligibleSet, as_fraction


@dataclass(frozen=True)
class LoadVector:
    per_ballot: tuple  # (ballot index, load)
    approval_weight: dict  # elected candidate -> approving weight


def _approval_weights(profile: ApprovalProfile, committee: frozenset) -> dict:
    weights = {c: Fraction(0) for c in committee}
    for b in profile.ballots:
        for c in b.approved & committee:
            weights[c] += b.weight
    missing = sorted(c for c, w in weights.items() if w <= 0)
    if missing:
        raise IneligibleSet(f"candidates without approvals: {missing}")
    return weights


def load_vector(profile: ApprovalProfile, committee: Iterable) -> LoadVector:
    committee = frozenset(committee)
    unknown = committee - set(profile.roster)
    if unknown:
        raise ValueError(f"unknown candidates {sorted(unknown)}")
    weights = _approval_weights(profile, committee)
    per_ballot = tuple(
        (i, sum((1 / weights[c] for c in b.approved & committee), Fraction(0)))
        for i, b in enumerate(profile.ballots)
    )
    return LoadVector(per_ballot, weights)


def ebert_sum_squared(profile: ApprovalProfile, committee: Iterable) -> Fraction:
    """Sum over ballots of weight times squared load."""
    loads = load_vector(profile, committee)
    return sum(
        (b.weight * load * load for b, (_, load) in zip(profile.ballots, loads.per_ballot)),
        Fraction(0),
    )


def variance_objective(profile: ApprovalProfile, committee: Iterable) -> Fraction:
    """Weighted variance of ballot loads around the mean load |W| / total weight."""
    committee = frozenset(committee)
    loads = load_vector(profile, committee)
    total = profile.total_weight
    mean = Fraction(len(committee)) / total
    return sum(
        (b.weight * (load - mean) ** 2 for b, (_, load) in zip(profile.ballots, loads.per_ballot)),
        Fraction(0),
    ) / total


def cfat_objective(profile: ApprovalProfile, committee: Iterable, fraction=Fraction(1, 2)) -> Fraction:
    """Sum of squared loads after splitting off ``fraction`` of every approval.

    Each approval survives independently with probability ``p = 1 - fraction``,
    so a candidate's effective support is ``p * A_c`` and its per-approval load is
    ``l_c = 1 / (p * A_c)``.  A ballot approving elected candidates with loads
    ``l_1..l_t`` contributes ``w * (p^2 (sum l)^2 + p (1 - p) sum l^2)``: the
    second moment of a sum of Bernoulli-scaled loads.  ``fraction = 1/2`` is
    the coin-flip transformation; ``fraction = 0`` is the raw objective.
    """
    fraction = as_fraction(fraction)
    if not 0 <= fraction < 1:
        raise ValueError("fraction must lie in [0, 1)")
    committee = frozenset(committee)
    weights = _approval_weights(profile, committee)
    p = 1 - fraction
    unit = {c: 1 / (p * w) for c, w in weights.items()}
    total = Fraction(0)
    for b in profile.ballots:
        elected = b.approved & committee
        if not elected:
            continue
        s = sum(unit[c] for c in elected)
        sq = sum(unit[c] ** 2 for c in elected)
        total += b.weight * (p * p * s * s + p * (1 - p) * sq)
    return total


def party_load_formula(seats: int, party_weight) -> Fraction:
    """Post-CFAT squared-load sum of a party of weight ``v`` holding ``s`` seats: s(s+1)/v."""
    v = as_fraction(party_weight)
    if v <= 0:
        raise ValueError("party weight must be positive")
    if seats < 0:
        raise ValueError("seats must be nonnegative")
    return Fraction(seats * (seats + 1)) / v


def matrix_objective(approvals, coapprovals, fraction=Fraction(1, 2), scale=1) -> Fraction:
    """The same objective from the in-set co-approval matrix alone.

    With ``r = fraction / (1 - fraction)`` the CFAT sum equals
    ``(1 + r) * sum_c 1/A_c + 2 * sum_{c<d} M_cd / (A_c A_d)``.  Inputs may be
    integer-scaled weights; ``scale`` undoes that (the objective is
    homogeneous of degree -1 in the weights).
    """
    fraction = as_fraction(fraction)
    r = fraction / (1 - fraction)
    k = len(approvals)
    value = (1 + r) * sum((Fraction(1, a) if isinstance(a, int) else 1 / a for a in approvals), Fraction(0))
    for c in range(k):
        row = coapprovals[c]
        for d in range(c + 1, k):
            if row[d]:
                value += Fraction(2 * row[d]) / (approvals[c] * approvals[d])
    return value * scale
