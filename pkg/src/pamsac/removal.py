"""Approval removal.

For a fixed committee, (fractions of) approvals are deleted from the raw
ballots whenever that lowers the post-CFAT squared-load sum.  Removal happens
in units of ``1 / granularity`` of a voter and never leaves a committee member
without approvals.  Removal always acts on raw ballots; the coin-flip split is
applied analytically afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb, lcm
from typing import Iterable

from . import _kernel_py, kernel
from .core import (
    ApprovalBallot,
    ApprovalProfile,
    GuardExceeded,
    IneligibleSet,
    ScoreBallot,
    ScoreProfile,
    as_fraction,
    normalize,
    normalize_scores,
)
from .loads import matrix_objective


@dataclass(frozen=True)
class Projection:
    """Integer-scaled view of a profile restricted to one committee.

    True weights are ``integer weight / scale``.  Each fragment is
    ``(ballot index, per-member scores, unit count)``; a ballot of weight w
    starts as one fragment of ``w * granularity`` units.
    """

    committee: tuple
    scale: int
    unit: tuple
    frags: tuple
    max_points: int
    weights: tuple  # true per-ballot weights


def _ratio(fraction: Fraction) -> tuple:
    r = fraction / (1 - fraction)
    return r.numerator, r.denominator


def units_per_ballot(weight: Fraction, granularity: int) -> int:
    """Each voter is cloned ``granularity`` times; a fractional ballot gets the
    nearest whole number of equal units at or above ``weight * granularity``."""
    n = weight * granularity
    return max(1, -(-n.numerator // n.denominator))


def project(profile, committee: Iterable, granularity: int = 1) -> Projection:
    """Project an approval or score profile onto ``committee``."""
    committee = tuple(committee)
    position = {c: i for i, c in enumerate(committee)}
    if len(position) != len(committee):
        raise ValueError("duplicate committee member")
    score_mode = isinstance(profile, ScoreProfile)
    max_points = profile.max_score if score_mode else 1
    frags = []
    weights = []
    raw_units = []
    for i, b in enumerate(profile.ballots):
        s = [0] * len(committee)
        if score_mode:
            for c, v in b.scores:
                if c in position:
                    s[position[c]] = v
        else:
            for c in b.approved:
                if c in position:
                    s[position[c]] = 1
        weights.append(b.weight)
        if b.weight > 0:
            n = units_per_ballot(b.weight, granularity)
            raw_units.append(b.weight / (n * max_points))
            if any(s):
                frags.append((i, tuple(s), n))
        else:
            raw_units.append(Fraction(0))
    scale = lcm(*(u.denominator for u in raw_units)) if raw_units else 1
    unit = tuple(int(u * scale) for u in raw_units)
    supported = [False] * len(committee)
    for _, s, _ in frags:
        for c, v in enumerate(s):
            if v:
                supported[c] = True
    missing = [c for c, ok in zip(committee, supported) if not ok]
    if missing:
        raise IneligibleSet(f"committee members without approvals: {missing}")
    return Projection(committee, scale, unit, tuple(frags), max_points, tuple(weights))


def _objective(A, M, fraction, scale):
    return matrix_objective(A, M, fraction, scale=scale)


def _aggregate(steps):
    totals: dict = {}
    for ballot, cand, weight in steps:
        totals[(ballot, cand)] = totals.get((ballot, cand), Fraction(0)) + weight
    return tuple((b, c, w) for (b, c), w in totals.items())


@dataclass(frozen=True)
class RemovalPlan:
    committee: tuple
    steps: tuple  # (ballot index, candidate, removed weight), aggregated
    objective: Fraction
    approvals_after: Fraction
    approvals_before: Fraction
    fragments: tuple  # (ballot index, kept in-set approvals, weight)
    source: ApprovalProfile

    @cached_property
    def resulting_profile(self) -> ApprovalProfile:
        """The raw-ballot profile after removal (still pre-CFAT)."""
        members = frozenset(self.committee)
        ballots = []
        covered = set()
        for i, kept, weight in self.fragments:
            covered.add(i)
            outside = self.source.ballots[i].approved - members
            ballots.append(ApprovalBallot(weight, kept | outside))
        for i, b in enumerate(self.source.ballots):
            if i not in covered:
                ballots.append(b)
        return normalize(ApprovalProfile(self.source.roster, tuple(ballots)))


def _plan_from_state(profile, proj, frags, steps, A, M, fraction):
    committee = proj.committee
    scale = proj.scale
    before = sum((proj.weights[i] * sum(s) for i, s, _ in proj.frags), Fraction(0))
    fragments = tuple(
        (i, frozenset(c for c, v in zip(committee, s) if v), Fraction(cnt * proj.unit[i], scale))
        for i, s, cnt in frags
    )
    return RemovalPlan(
        committee=committee,
        steps=_aggregate(steps),
        objective=_objective(A, M, fraction, scale),
        approvals_after=Fraction(sum(A), scale),
        approvals_before=before,
        fragments=fragments,
        source=profile,
    )


def no_removal(profile: ApprovalProfile, committee: Iterable, fraction=Fraction(1, 2)) -> RemovalPlan:
    fraction = as_fraction(fraction)
    proj = project(profile, committee, 1)
    A, M = kernel.coapproval(len(proj.committee), proj.unit, proj.frags)
    return _plan_from_state(profile, proj, proj.frags, [], A, M, fraction)


DESCENT_WIDTH = 10


def _removed(proj, frags):
    """Aggregate removed weight per (ballot, member) from final fragments."""
    kept: dict = {}
    for b, s, cnt in frags:
        for c, v in enumerate(s):
            if v:
                kept[(b, c)] = kept.get((b, c), 0) + cnt
    steps = []
    for b, s, cnt in proj.frags:
        for c, v in enumerate(s):
            if v and kept.get((b, c), 0) < cnt:
                steps.append(
                    (b, proj.committee[c], Fraction((cnt - kept.get((b, c), 0)) * proj.unit[b], proj.scale))
                )
    return steps


def _local_search(profile, committee, fraction, granularity, backend) -> RemovalPlan:
    """Best of three deterministic local searches, comparing objective first and
    retained approval weight second:

    * single-approval greedy: one unit loses one approval at a time, always
      the largest decrease, until nothing helps; then reassignment polish;
    * reassignment descent from the unreduced ballots, preferring to keep
      approvals on ties;
    * the same descent preferring to drop approvals on ties, then polish.

    A reassignment moves one unit of a ballot from its current kept subset to
    any other subset of its original in-set approvals.  Ballots with more than
    ``DESCENT_WIDTH`` in-set approvals only get the first search.
    """
    proj = project(profile, committee, granularity)
    k = len(proj.committee)
    rn, rd = _ratio(fraction)
    start = list(proj.frags)
    full = {b: s for b, s, _ in proj.frags}
    frags, _, A, M = kernel.settle(k, rn, rd, proj.unit, start, 1, backend=backend)
    runs = [(frags, A, M)]
    if all(sum(s) <= DESCENT_WIDTH for s in full.values()):
        runs = [kernel.descend(k, rn, rd, proj.unit, frags, 0, full, backend=backend)]
        runs.append(kernel.descend(k, rn, rd, proj.unit, start, 0, full, backend=backend))
        dropped, _, _ = kernel.descend(k, rn, rd, proj.unit, start, 1, full, backend=backend)
        runs.append(kernel.descend(k, rn, rd, proj.unit, dropped, 0, full, backend=backend))
    best = None
    for frags, A, M in runs:
        key = (_objective(A, M, fraction, proj.scale), -sum(A))
        if best is None or key < best[0]:
            best = (key, frags, A, M)
    _, frags, A, M = best
    return _plan_from_state(profile, proj, frags, _removed(proj, frags), A, M, fraction)


def greedy_removal(
    profile: ApprovalProfile, committee: Iterable, fraction=Fraction(1, 2), granularity: int = 6, backend=None
) -> RemovalPlan:
    """Heuristic removal on the ``1 / granularity`` voter grid.

    Runs the local searches of :func:`_local_search` and also tries one
    structured start per dominated outsider: if every ballot approving an
    outsider ``b`` approves member ``a`` and some ballot approves ``a`` alone,
    then removing ``a`` from the ballots without ``b`` makes ``a`` a copy of
    ``b``, so the plan found for the set with ``b`` in place of ``a`` carries
    over at the same objective.  The best plan is kept; as a result a set
    never scores worse than the same set with a member swapped for one it
    dominates.
    """
    return _greedy(profile, tuple(committee), as_fraction(fraction), granularity, backend)


@lru_cache(maxsize=4096)
def _greedy(profile, committee, fraction, granularity, backend) -> RemovalPlan:
    best = _local_search(profile, committee, fraction, granularity, backend)
    voters = {
        c: frozenset(i for i, b in enumerate(profile.ballots) if b.weight > 0 and c in b.approved)
        for c in profile.roster
    }
    members = frozenset(committee)
    for pos, a in enumerate(committee):
        for b in profile.roster:
            if b in members or not voters[b] or not voters[b] < voters[a]:
                continue
            swapped = committee[:pos] + (b,) + committee[pos + 1 :]
            plan = _carry_over(profile, committee, a, b, _greedy(profile, swapped, fraction, granularity, backend))
            if (plan.objective, -plan.approvals_after) < (best.objective, -best.approvals_after):
                best = replace(plan, approvals_before=best.approvals_before)
    return best


def _carry_over(profile, committee, a, b, plan: RemovalPlan) -> RemovalPlan:
    """Turn a plan for ``committee`` with ``b`` in place of ``a`` into a plan for
    ``committee``: ``a`` is kept exactly where ``b`` is kept."""
    members = frozenset(committee)
    fragments = []
    covered = set()
    for i, kept, w in plan.fragments:
        covered.add(i)
        fragments.append((i, (kept - {b}) | ({a} if b in kept else set()), w))
    for i, bl in enumerate(profile.ballots):
        if i not in covered and bl.weight > 0 and bl.approved & members:
            fragments.append((i, frozenset(), bl.weight))
    fragments = tuple(sorted(((i, frozenset(k), w) for i, k, w in fragments), key=lambda f: (f[0], sorted(f[1]), f[2])))
    kept_weight: dict = {}
    for i, kept, w in fragments:
        for c in kept:
            kept_weight[(i, c)] = kept_weight.get((i, c), Fraction(0)) + w
    steps = []
    for i, bl in enumerate(profile.ballots):
        for c in committee:
            if c in bl.approved and bl.weight > 0:
                lost = bl.weight - kept_weight.get((i, c), Fraction(0))
                if lost:
                    steps.append((i, c, lost))
    return RemovalPlan(
        committee=committee,
        steps=tuple(steps),
        objective=plan.objective,
        approvals_after=plan.approvals_after,
        approvals_before=plan.approvals_before,
        fragments=fragments,
        source=profile,
    )


def _submasks(s: tuple):
    on = [i for i, v in enumerate(s) if v]
    for size in range(len(on), -1, -1):
        for kept in combinations(on, size):
            yield tuple(1 if i in kept else 0 for i in range(len(s)))


def exact_removal(
    profile: ApprovalProfile,
    committee: Iterable,
    fraction=Fraction(1, 2),
    granularity: int = 6,
    guard: int = 10**6,
) -> RemovalPlan:
    """Globally optimal removal on the ``1 / granularity`` voter grid.

    Dynamic programme over ballots whose state is the integer co-approval
    matrix; among optimal plans the one keeping the most approvals is chosen.
    """
    fraction = as_fraction(fraction)
    proj = project(profile, committee, granularity)
    k = len(proj.committee)
    pairs = [(c, d) for c in range(k) for d in range(c + 1, k)]
    layers = [{(0,) * (k + len(pairs)): None}]
    work = 0
    for b, s, q in proj.frags:
        u = proj.unit[b]
        masks = tuple(_submasks(s))
        if work + len(layers[-1]) * comb(len(masks) + q - 1, q) > guard:
            raise GuardExceeded(f"exact removal search exceeds {guard} states")
        options = []
        for dist in combinations_with_replacement(masks, q):
            delta = [0] * (k + len(pairs))
            for t in dist:
                for c in range(k):
                    if t[c]:
                        delta[c] += u
                for j, (c, d) in enumerate(pairs):
                    if t[c] and t[d]:
                        delta[k + j] += u
            options.append((dist, tuple(delta)))
        work += len(layers[-1]) * len(options)
        if work > guard:
            raise GuardExceeded(f"exact removal search exceeds {guard} states")
        nxt = {}
        for state in layers[-1]:
            for dist, delta in options:
                new = tuple(x + y for x, y in zip(state, delta))
                if new not in nxt:
                    nxt[new] = (state, dist)
        layers.append(nxt)

    def unpack(state):
        A = list(state[:k])
        M = [[0] * k for _ in range(k)]
        for j, (c, d) in enumerate(pairs):
            M[c][d] = M[d][c] = state[k + j]
        return A, M

    best = None
    for state in layers[-1]:
        A, M = unpack(state)
        if min(A) <= 0:
            continue
        key = (_objective(A, M, fraction, proj.scale), -sum(A), state)
        if best is None or key < best[0]:
            best = (key, state)
    if best is None:
        raise IneligibleSet("no removal keeps every member approved")
    state = best[1]
    frags = []
    steps = []
    for depth in range(len(proj.frags), 0, -1):
        prev, dist = layers[depth][state]
        b, s, _ = proj.frags[depth - 1]
        counts: dict = {}
        for t in dist:
            counts[t] = counts.get(t, 0) + 1
            for c in range(k):
                if s[c] and not t[c]:
                    steps.append((b, proj.committee[c], Fraction(proj.unit[b], proj.scale)))
        frags.extend((b, t, n) for t, n in counts.items())
        state = prev
    frags.sort()
    steps.sort(key=lambda x: (x[0], proj.committee.index(x[1])))
    A, M = unpack(best[1])
    return _plan_from_state(profile, proj, frags, steps, A, M, fraction)


@dataclass(frozen=True)
class ScoreRemovalPlan:
    committee: tuple
    steps: tuple  # (ballot index, candidate, removed approval weight on the split image)
    objective: Fraction
    approvals_after: Fraction
    approvals_before: Fraction
    fragments: tuple  # (ballot index, {candidate: score} restricted to committee, weight)
    source: ScoreProfile

    @cached_property
    def resulting_profile(self) -> ScoreProfile:
        members = frozenset(self.committee)
        ballots = []
        covered = set()
        for i, scores, weight in self.fragments:
            covered.add(i)
            outside = {c: v for c, v in self.source.ballots[i].scores if c not in members}
            ballots.append(ScoreBallot(weight, {**outside, **dict(scores)}))
        for i, b in enumerate(self.source.ballots):
            if i not in covered:
                ballots.append(b)
        return normalize_scores(ScoreProfile(self.source.roster, tuple(ballots), self.source.max_score))


def score_reduction_removal(
    profile: ScoreProfile,
    committee: Iterable,
    fraction=Fraction(1, 2),
    granularity: int = 1,
    backend=None,
) -> ScoreRemovalPlan:
    """Score reduction before the score-to-approval split.

    Reducing a score by ``r`` points deletes the candidate from the top ``r``
    approving parts of that ballot unit, so the split image stays valid.  The
    greedy pass exhausts one-point reductions first; a larger reduction is used
    only when no smaller one helps, and smaller sizes are re-checked after it.
    As with approval ballots, reassignment descents (here: any per-unit score
    vector between zero and the original scores) run from the greedy end point
    and from the unreduced ballots, and the best plan is kept.

    With ``max_score == 1`` this is :func:`greedy_removal` on the approval image.
    """
    fraction = as_fraction(fraction)
    committee = tuple(committee)
    if profile.max_score == 1:
        plan = greedy_removal(profile.approval_image(), committee, fraction, granularity, backend)
        return _score_plan_from_approval(profile, plan)
    proj = project(profile, committee, granularity)
    k = len(proj.committee)
    rn, rd = _ratio(fraction)
    m = proj.max_points
    start = list(proj.frags)
    full = {b: s for b, s, _ in proj.frags}
    frags, _, A, M = kernel.settle(k, rn, rd, proj.unit, start, m, backend=backend)
    runs = [(frags, A, M)]
    if all(_options(s) <= 2**DESCENT_WIDTH for s in full.values()):
        runs = [_kernel_py.descend_scores(k, rn, rd, proj.unit, frags, 0, full)]
        runs.append(_kernel_py.descend_scores(k, rn, rd, proj.unit, start, 0, full))
        dropped, _, _ = _kernel_py.descend_scores(k, rn, rd, proj.unit, start, 1, full)
        runs.append(_kernel_py.descend_scores(k, rn, rd, proj.unit, dropped, 0, full))
    best = None
    for frags, A, M in runs:
        key = (_objective(A, M, fraction, proj.scale), -sum(A))
        if best is None or key < best[0]:
            best = (key, frags, A, M)
    _, frags, A, M = best
    kept: dict = {}
    for b, s, cnt in frags:
        for c, v in enumerate(s):
            kept[(b, c)] = kept.get((b, c), 0) + cnt * v
    steps = []
    for b, s, cnt in proj.frags:
        for c, v in enumerate(s):
            lost = cnt * v - kept.get((b, c), 0)
            if lost:
                steps.append((b, proj.committee[c], Fraction(lost * proj.unit[b], proj.scale)))
    before = sum((proj.weights[i] * sum(s) for i, s, _ in proj.frags), Fraction(0)) / m
    fragments = tuple(
        (i, tuple(zip(proj.committee, s)), Fraction(cnt * proj.unit[i] * m, proj.scale))
        for i, s, cnt in frags
    )
    return ScoreRemovalPlan(
        committee=proj.committee,
        steps=tuple(steps),
        objective=_objective(A, M, fraction, proj.scale),
        approvals_after=Fraction(sum(A), proj.scale),
        approvals_before=before,
        fragments=fragments,
        source=profile,
    )


def _options(scores) -> int:
    n = 1
    for v in scores:
        n *= v + 1
    return n


def _score_plan_from_approval(profile: ScoreProfile, plan: RemovalPlan) -> ScoreRemovalPlan:
    fragments = tuple(
        (i, tuple((c, 1 if c in kept else 0) for c in plan.committee), w) for i, kept, w in plan.fragments
    )
    return ScoreRemovalPlan(
        committee=plan.committee,
        steps=plan.steps,
        objective=plan.objective,
        approvals_after=plan.approvals_after,
        approvals_before=plan.approvals_before,
        fragments=fragments,
        source=profile,
    )
