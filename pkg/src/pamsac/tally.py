"""PAMSAC and PAMSACK tallies.

A candidate set is measured by the smallest squared-load sum reachable by
approval removal followed by the coin-flip split.  Lower is better; ties go to
the set keeping more in-set approval weight after removal, then to the set with
more in-set approval weight before removal, then to the lexicographically
smallest set under roster order.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable

from . import kernel
from .committees import clone_classes, committees, lex_key, select
from .core import (
    ApprovalProfile,
    ElectionConfig,
    ElectionResult,
    InfeasibleElection,
    ScoreBallot,
    ScoreProfile,
    SetEvaluation,
)
from .loads import matrix_objective
from .removal import exact_removal, greedy_removal, project, score_reduction_removal

LEVELS = ("objective", "approvals_after", "approvals_before")


def decided_at(trace) -> int:
    """Index of the first comparison level that left a single set.

    0 is the objective, 1 and 2 the approval tie-breaks, 3 the lexicographic
    rule.
    """
    for depth, (_, survivors) in enumerate(trace):
        if survivors == 1:
            return depth
    return len(trace) - 1


def _unreduced(profile, committee, fraction) -> SetEvaluation:
    proj = project(profile, committee, 1)
    A, M = kernel.coapproval(len(proj.committee), proj.unit, proj.frags)
    total = Fraction(sum(A), proj.scale)
    return SetEvaluation(
        candidates=proj.committee,
        objective=matrix_objective(A, M, fraction, proj.scale),
        approvals_after=total,
        approvals_before=total,
    )


def evaluate_set(profile: ApprovalProfile, committee: Iterable, config: ElectionConfig) -> SetEvaluation:
    """Objective and tie-break totals of one candidate set.

    Raises :class:`~pamsac.core.IneligibleSet` when a member has no approvals.
    """
    committee = profile.sort_set(committee)
    f = config.cfat_fraction
    if isinstance(profile, ScoreProfile):
        return evaluate_score_set(profile, committee, config)
    if config.removal == "none":
        return _unreduced(profile, committee, f)
    if config.removal == "greedy":
        plan = greedy_removal(profile, committee, f, config.granularity)
    else:
        plan = exact_removal(profile, committee, f, config.granularity, config.exact_guard)
    return SetEvaluation(committee, plan.objective, plan.approvals_after, plan.approvals_before, plan.steps)


def evaluate_score_set(profile: ScoreProfile, committee: Iterable, config: ElectionConfig) -> SetEvaluation:
    """Score-ballot counterpart of :func:`evaluate_set`; totals are measured on
    the score-to-approval split."""
    committee = profile.sort_set(committee)
    f = config.cfat_fraction
    if config.removal == "none":
        return _unreduced(profile, committee, f)
    if config.removal == "exact":
        if profile.max_score != 1:
            raise ValueError("exact removal is only available for approval ballots")
        plan = exact_removal(profile.approval_image(), committee, f, config.granularity, config.exact_guard)
    else:
        plan = score_reduction_removal(profile, committee, f, config.granularity)
    return SetEvaluation(committee, plan.objective, plan.approvals_after, plan.approvals_before, plan.steps)


def _columns(profile):
    if isinstance(profile, ScoreProfile):
        table = [dict(b.scores) for b in profile.ballots]
        return lambda c: tuple(row.get(c, 0) for row in table)
    return lambda c: tuple(c in b.approved for b in profile.ballots)


def _pool(profile) -> tuple:
    if isinstance(profile, ScoreProfile):
        totals = profile.score_totals()
        return tuple(c for c in profile.roster if totals.get(c, 0) > 0)
    return profile.approved_candidates()


def _feasible(profile, seats):
    pool = _pool(profile)
    if len(pool) < seats:
        raise InfeasibleElection(
            f"{seats} seats but only {len(pool)} candidates with approvals"
        )
    return pool


def tally(profile: ApprovalProfile, config: ElectionConfig, method: str = "pamsac") -> ElectionResult:
    """Exhaustive PAMSAC tally over every eligible set of ``config.seats``.

    Candidates with identical ballot columns are interchangeable, so only one
    representative per clone pattern is evaluated; the trace counts every set.
    """
    if config.search == "sequential":
        return tally_sequential(profile, config, method)
    pool = _feasible(profile, config.seats)
    index = {c: i for i, c in enumerate(profile.roster)}
    classes = clone_classes(profile.roster, pool, _columns(profile))
    entries = []
    for committee, mult in committees(classes, config.seats, config.enumeration_guard):
        ev = evaluate_set(profile, committee, config)
        entries.append((ev.key(), lex_key(index, committee), mult, ev))
    best, trace = select(entries, LEVELS)
    return ElectionResult(method, best.candidates, best.objective, best, trace)


def tally_sequential(profile: ApprovalProfile, config: ElectionConfig, method: str = "pamsac") -> ElectionResult:
    """Add one seat at a time, each time the candidate whose addition gives the
    best set under the usual comparison.  The first seat is therefore the
    approval (or score) winner."""
    pool = _feasible(profile, config.seats)
    index = {c: i for i, c in enumerate(profile.roster)}
    elected: tuple = ()
    traces = []
    best = None
    for _ in range(config.seats):
        entries = []
        for c in pool:
            if c in elected:
                continue
            committee = profile.sort_set(elected + (c,))
            ev = evaluate_set(profile, committee, config)
            entries.append((ev.key(), lex_key(index, committee), 1, ev))
        best, trace = select(entries, LEVELS)
        traces.append(trace)
        elected = best.candidates
    return ElectionResult(method, best.candidates, best.objective, best, traces[-1], notes=("sequential",))


def canonical_scores(profile: ScoreProfile) -> ScoreProfile:
    """Divide the maximum score and every score by their common divisor."""
    g = profile.max_score
    for b in profile.ballots:
        for _, v in b.scores:
            g = gcd(g, v)
    if g == 1:
        return profile
    ballots = tuple(ScoreBallot(b.weight, {c: v // g for c, v in b.scores}) for b in profile.ballots)
    return ScoreProfile(profile.roster, ballots, profile.max_score // g)


def tally_score(profile: ScoreProfile, config: ElectionConfig, method: str = "pamsack") -> ElectionResult:
    """PAMSACK: the PAMSAC tally on score ballots.

    Scores are first reduced to lowest terms with the maximum score, so a
    profile and any integer multiple of it are tallied identically.
    """
    return tally(canonical_scores(profile), config, method)
