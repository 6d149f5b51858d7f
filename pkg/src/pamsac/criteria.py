"""Executable proportionality and monotonicity criteria.

A *method* here is any callable ``method(profile, seats) -> ElectionResult``;
:mod:`pamsac.methods` builds them by name.  PR and strong PR are checked on
explicit faction profiles, monotonicity and participation by seeded random
probes, and positive support by scanning a one-parameter profile family.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import floor
from typing import Callable, Iterable, Sequence

from .core import ApprovalProfile, as_fraction, format_approval_profile

Method = Callable


# factions, PR and strong PR

@dataclass(frozen=True)
class FactionProfileSpec:
    """Factional voting: each faction approves exactly its own candidates plus
    the universal block."""

    factions: tuple  # (weight, candidates)
    universal: tuple = ()

    def __post_init__(self):
        factions = tuple((as_fraction(w), tuple(c)) for w, c in self.factions)
        object.__setattr__(self, "factions", factions)
        object.__setattr__(self, "universal", tuple(self.universal))
        seen = set(self.universal)
        if len(seen) != len(self.universal):
            raise ValueError("duplicate universal candidate")
        for w, cands in factions:
            if w <= 0:
                raise ValueError("faction weights must be positive")
            if seen & set(cands) or len(set(cands)) != len(cands):
                raise ValueError("faction candidate sets must be disjoint")
            seen |= set(cands)

    @property
    def roster(self) -> tuple:
        return self.universal + tuple(c for _, cands in self.factions for c in cands)

    def profile(self) -> ApprovalProfile:
        pairs = [(w, self.universal + cands) for w, cands in self.factions]
        return ApprovalProfile.from_pairs(pairs, roster=self.roster)

    def floors(self, seats: int) -> tuple:
        """Minimal proportional allocation of each faction."""
        total = sum((w for w, _ in self.factions), Fraction(0))
        return tuple(floor(w * seats / total) for w, _ in self.factions)


@dataclass(frozen=True)
class CriterionReport:
    passed: bool
    allocation: tuple  # seats per faction
    floors: tuple
    winners: tuple
    universal_elected: bool = True


def _faction_report(spec: FactionProfileSpec, winners, seats: int, universal_ok=True) -> CriterionReport:
    floors = spec.floors(seats)
    for (_, cands), need in zip(spec.factions, floors):
        if len(cands) < need:
            raise ValueError("a faction has fewer candidates than its minimal allocation")
    elected = set(winners)
    allocation = tuple(len(elected & set(cands)) for _, cands in spec.factions)
    passed = universal_ok and all(a >= f for a, f in zip(allocation, floors))
    return CriterionReport(passed, allocation, floors, tuple(winners), universal_ok)


def check_pr(method: Method, spec: FactionProfileSpec, seats: int) -> CriterionReport:
    """Every faction wins at least the floor of its share of the seats."""
    if spec.universal:
        raise ValueError("PR is checked without a universal block; use check_strong_pr")
    result = method(spec.profile(), seats)
    return _faction_report(spec, result.winners, seats)


def check_strong_pr(method: Method, spec: FactionProfileSpec, seats: int) -> CriterionReport:
    """Universal candidates are all elected and the remaining seats satisfy PR
    among the factions alone."""
    u = len(spec.universal)
    if not 0 < u < seats:
        raise ValueError("need a universal block smaller than the number of seats")
    result = method(spec.profile(), seats)
    universal_ok = set(spec.universal) <= set(result.winners)
    rest = FactionProfileSpec(spec.factions)
    report = _faction_report(rest, [c for c in result.winners if c not in spec.universal], seats - u, universal_ok)
    return replace(report, winners=tuple(result.winners))


# positive support

@dataclass(frozen=True)
class FactionSizeList:
    sizes: tuple

    def __post_init__(self):
        sizes = tuple(sorted((as_fraction(s) for s in self.sizes), reverse=True))
        object.__setattr__(self, "sizes", sizes)


def faction_dominates(a, b) -> bool:
    """True when faction-size list ``b`` is pointwise at least ``a`` and larger
    somewhere."""
    a = a.sizes if isinstance(a, FactionSizeList) else FactionSizeList(a).sizes
    b = b.sizes if isinstance(b, FactionSizeList) else FactionSizeList(b).sizes
    if len(a) != len(b):
        raise ValueError("faction size lists differ in length")
    return all(y >= x for x, y in zip(a, b)) and any(y > x for x, y in zip(a, b))


@dataclass(frozen=True)
class ProfileFamily:
    """``build(x)`` returns the profile for parameter ``x``; ``x_set`` is the
    result expected to win early and ``y_set`` the dominating one."""

    name: str
    build: Callable
    seats: int
    x_set: frozenset
    y_set: frozenset


def textbook_family() -> ProfileFamily:
    def build(x):
        return ApprovalProfile.from_pairs([(x, "ABC"), (x, "ABD"), (1, "C"), (1, "D")])

    return ProfileFamily("textbook", build, 2, frozenset("CD"), frozenset("AB"))


def clone_block_family(base=((3, "A"), (3, "B"), (3, "C"), (4, "ABF"))) -> ProfileFamily:
    """A base profile won by ABC plus ``x`` copies of the block ADE / BDE / CF,
    for which both ABC and DEF are proportional and DEF dominates.

    Within the block, CDE is as good as DEF, so a base that favours C over F
    hands the limit to CDE.  The default base gives F some support among A and
    B voters so that DEF is the limiting winner.
    """
    base = tuple(base)

    def build(x):
        block = [(x, "ADE"), (x, "BDE"), (x, "CF")] if x else []
        return ApprovalProfile.from_pairs(list(base) + block, roster=tuple("ABCDEF"))

    return ProfileFamily("clone-block", build, 3, frozenset("ABC"), frozenset("DEF"))


@dataclass(frozen=True)
class CrossoverReport:
    family: str
    crossover: int | None  # least x electing the dominating set
    winners: tuple  # (x, winners) for every scanned x
    ties: tuple = ()  # x values where the deciding comparison was a tie-break


def scan_positive_support(method: Method, family: ProfileFamily, x_range: Iterable[int]) -> CrossoverReport:
    rows = []
    ties = []
    crossover = None
    for x in x_range:
        result = method(family.build(x), family.seats)
        rows.append((x, tuple(result.winners)))
        if result.tie_trace and result.tie_trace[0][1] > 1:
            ties.append(x)
        if crossover is None and frozenset(result.winners) == family.y_set:
            crossover = x
    return CrossoverReport(family.name, crossover, tuple(rows), tuple(ties))


# random probes

@dataclass(frozen=True)
class Counterexample:
    kind: str  # "added-approval", "dominance" or "participation"
    profile: str  # ballot text of the profile the method got wrong
    seats: int
    before: tuple
    after: tuple
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "profile": self.profile,
            "seats": self.seats,
            "before": list(self.before),
            "after": list(self.after),
            "detail": self.detail,
        }


LETTERS = "ABCDEF"


def random_profile(rng: random.Random, candidates: int = 6, ballots: int = 8, weight: int = 4):
    """Small random profile: up to ``candidates`` candidates, ``ballots``
    ballot lines and integer weights up to ``weight``."""
    roster = tuple(LETTERS[: rng.randint(2, candidates)])
    pairs = []
    for _ in range(rng.randint(1, ballots)):
        approved = [c for c in roster if rng.random() < 0.5]
        pairs.append((rng.randint(1, weight), approved))
    return roster, pairs


def _trial_rng(seed, trial) -> random.Random:
    return random.Random(f"{seed}:{trial}")


def dominance_pairs(profile: ApprovalProfile):
    """Pairs ``(a, b)`` where every voter approving b approves a and at least
    one further voter approves a."""
    voters = {c: {i for i, bl in enumerate(profile.ballots) if c in bl.approved} for c in profile.roster}
    for a in profile.roster:
        for b in profile.roster:
            if a != b and voters[b] < voters[a]:
                yield a, b


def _dominance_violations(profile, winners) -> list:
    elected = set(winners)
    return [(a, b) for a, b in dominance_pairs(profile) if b in elected and a not in elected]


def _seats(rng, profile) -> int | None:
    pool = profile.approved_candidates()
    if not pool:
        return None
    return rng.randint(1, min(len(pool), 4))


def probe_monotonicity(method: Method, seed=0, trials: int = 1000) -> list:
    """Random search for monotonicity failures.

    Per trial: a random profile is tallied; one winner gains an approval from a
    ballot that lacked it and must stay elected.  A second profile is built in
    which some candidate a is approved wherever b is and on at least one more
    ballot; in every tallied profile, a dominated winner must come with its
    dominating candidate.
    """
    found = []
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        roster, pairs = random_profile(rng)
        profile = ApprovalProfile.from_pairs(pairs, roster=roster)
        seats = _seats(rng, profile)
        if seats is None:
            continue
        winners = method(profile, seats).winners
        for a, b in _dominance_violations(profile, winners):
            found.append(_example("dominance", profile, seats, winners, winners, {"a": a, "b": b, "trial": trial}))

        c = rng.choice(sorted(winners, key=roster.index))
        lacking = [i for i, (_, s) in enumerate(pairs) if c not in s]
        if lacking:
            i = rng.choice(lacking)
            richer = list(pairs)
            richer[i] = (pairs[i][0], list(pairs[i][1]) + [c])
            after = ApprovalProfile.from_pairs(richer, roster=roster)
            new = method(after, seats).winners
            if c not in new:
                found.append(
                    _example("added-approval", profile, seats, winners, new, {"candidate": c, "ballot": i, "trial": trial})
                )

        if len(roster) >= 2:
            a, b = rng.sample(roster, 2)
            dom = [(w, list(s) + [a] if b in s and a not in s else list(s)) for w, s in pairs]
            spare = [i for i, (_, s) in enumerate(dom) if a not in s]
            if spare:
                i = rng.choice(spare)
                dom[i] = (dom[i][0], dom[i][1] + [a])
            built = ApprovalProfile.from_pairs(dom, roster=roster)
            seats2 = _seats(rng, built)
            if seats2 is not None:
                won = method(built, seats2).winners
                for x, y in _dominance_violations(built, won):
                    found.append(_example("dominance", built, seats2, won, won, {"a": x, "b": y, "trial": trial}))
    return found


def _example(kind, profile, seats, before, after, detail) -> Counterexample:
    return Counterexample(kind, format_approval_profile(profile), seats, tuple(before), tuple(after), detail)


def probe_participation(method: Method, seed=0, trials: int = 1000) -> list:
    """Random search for participation failures.

    One voter (one unit of weight of a random ballot) abstains; the failure is
    that the abstaining voter ends up with more approved winners than when
    voting.
    """
    found = []
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        roster, pairs = random_profile(rng)
        profile = ApprovalProfile.from_pairs(pairs, roster=roster)
        if profile.total_weight <= 1:
            continue
        seats = _seats(rng, profile)
        if seats is None:
            continue
        i = rng.randrange(len(pairs))
        weight, approved = pairs[i]
        rest = list(pairs)
        rest[i] = (weight - 1, approved)
        without = ApprovalProfile.from_pairs([p for p in rest if p[0] > 0], roster=roster)
        if len(without.approved_candidates()) < seats:
            continue
        with_vote = method(profile, seats).winners
        absent = method(without, seats).winners
        ballot = set(approved)
        if len(ballot & set(absent)) > len(ballot & set(with_vote)):
            found.append(
                _example("participation", profile, seats, with_vote, absent, {"ballot": sorted(ballot), "trial": trial})
            )
    return found


def dump_counterexamples(examples: Sequence[Counterexample], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([e.to_json() for e in examples], fh, indent=2, sort_keys=True)
        fh.write("\n")
