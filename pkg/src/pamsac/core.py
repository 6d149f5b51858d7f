"""Ballot and profile data model, the line-based ballot format, and election configuration.

All weights are :class:`fractions.Fraction`; nothing in this package touches floats.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Candidate = str

_TOKEN = re.compile(r"^[^\s=:]+$")

REMOVAL_MODES = ("none", "greedy", "exact")
SEARCH_MODES = ("exhaustive", "sequential")


class ElectionError(Exception):
    """Base class for every error raised by this package."""


class BallotParseError(ElectionError, ValueError):
    """Malformed ballot text."""


class InfeasibleElection(ElectionError, ValueError):
    """The configuration cannot produce a committee (e.g. too few approved candidates)."""


class IneligibleSet(ElectionError, ValueError):
    """A candidate set contains a member with zero approval weight."""


class GuardExceeded(ElectionError, RuntimeError):
    """A search or expansion would exceed its configured size guard."""


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and rational literals (``"3/2"``, ``"1.5"``) exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a weight")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise BallotParseError(f"malformed weight {value!r}") from exc
    return Fraction(value)


def fraction_str(value: Fraction) -> str:
    """``Fraction(31, 12)`` -> ``"31/12"``; integers print without a denominator."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def check_candidate(name: str) -> Candidate:
    if not isinstance(name, str) or not _TOKEN.match(name):
        raise BallotParseError(f"invalid candidate name {name!r}")
    return name


@dataclass(frozen=True)
class ApprovalBallot:
    weight: Fraction
    approved: frozenset

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        object.__setattr__(self, "approved", frozenset(self.approved))
        if self.weight < 0:
            raise ValueError("ballot weight must be nonnegative")


@dataclass(frozen=True)
class ApprovalProfile:
    """A multiset of weighted approval ballots over an ordered candidate roster."""

    roster: tuple
    ballots: tuple

    def __post_init__(self):
        roster = tuple(check_candidate(c) for c in self.roster)
        if len(set(roster)) != len(roster):
            raise ValueError("duplicate candidate in roster")
        ballots = tuple(
            b if isinstance(b, ApprovalBallot) else ApprovalBallot(*b) for b in self.ballots
        )
        known = set(roster)
        for b in ballots:
            unknown = b.approved - known
            if unknown:
                raise ValueError(f"approved candidates not in roster: {sorted(unknown)}")
        object.__setattr__(self, "roster", roster)
        object.__setattr__(self, "ballots", ballots)

    @classmethod
    def from_pairs(cls, pairs: Iterable, roster: Sequence[Candidate] | None = None):
        """Build from ``(weight, approvals)`` pairs; approvals may be a string of
        single-letter candidates (``"ABC"``) or any iterable of names."""
        ballots = []
        seen: list = []
        for weight, approved in pairs:
            names = list(approved)
            for c in names:
                if c not in seen:
                    seen.append(c)
            ballots.append(ApprovalBallot(weight, names))
        if roster is None:
            roster = seen
        return normalize(cls(tuple(roster), tuple(ballots)))

    @property
    def total_weight(self) -> Fraction:
        return sum((b.weight for b in self.ballots), Fraction(0))

    def index(self, candidate: Candidate) -> int:
        return self.roster.index(candidate)

    def approval_weight(self, candidate: Candidate) -> Fraction:
        return sum((b.weight for b in self.ballots if candidate in b.approved), Fraction(0))

    def approval_weights(self) -> dict:
        totals = {c: Fraction(0) for c in self.roster}
        for b in self.ballots:
            for c in b.approved:
                totals[c] += b.weight
        return totals

    def approved_candidates(self) -> tuple:
        """Candidates with positive approval weight, in roster order."""
        totals = self.approval_weights()
        return tuple(c for c in self.roster if totals[c] > 0)

    def sort_set(self, candidates: Iterable[Candidate]) -> tuple:
        order = {c: i for i, c in enumerate(self.roster)}
        return tuple(sorted(candidates, key=order.__getitem__))

    def scaled(self, factor) -> "ApprovalProfile":
        factor = as_fraction(factor)
        return ApprovalProfile(
            self.roster, tuple(ApprovalBallot(b.weight * factor, b.approved) for b in self.ballots)
        )

    def with_ballots(self, ballots: Iterable) -> "ApprovalProfile":
        return normalize(ApprovalProfile(self.roster, tuple(ballots)))

    def __str__(self) -> str:
        return format_approval_profile(self)


def normalize(profile: ApprovalProfile) -> ApprovalProfile:
    """Merge identical approval sets, drop zero weights, and sort ballots by
    their approval set under roster order."""
    order = {c: i for i, c in enumerate(profile.roster)}
    merged: dict = {}
    for b in profile.ballots:
        if b.weight == 0:
            continue
        merged[b.approved] = merged.get(b.approved, Fraction(0)) + b.weight

    def key(item):
        return tuple(sorted(order[c] for c in item[0]))

    ballots = tuple(ApprovalBallot(w, s) for s, w in sorted(merged.items(), key=key))
    return ApprovalProfile(profile.roster, ballots)


def _split_header(line: str):
    head, sep, rest = line.partition(":")
    return head.strip(), sep, rest


def _roster_header(rest: str, lineno: int) -> list:
    names = rest.split()
    for n in names:
        check_candidate(n)
    if len(set(names)) != len(names):
        raise BallotParseError(f"line {lineno}: duplicate candidate in roster header")
    return names


def parse_approval_profile(text: str) -> ApprovalProfile:
    """Parse ``WEIGHT: CAND CAND ...`` lines.

    ``#`` starts a comment line; an optional ``candidates: A B C`` line fixes the
    roster and makes unknown names an error.  Identical ballots are merged.
    """
    header = None
    ballots = []
    seen: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, rest = _split_header(line)
        if not sep:
            raise BallotParseError(f"line {lineno}: expected 'WEIGHT: CANDIDATES'")
        if head.lower() == "candidates":
            if header is not None or ballots:
                raise BallotParseError(f"line {lineno}: roster header must come first and once")
            header = _roster_header(rest, lineno)
            continue
        try:
            weight = as_fraction(head)
        except (BallotParseError, TypeError) as exc:
            raise BallotParseError(f"line {lineno}: malformed weight {head!r}") from exc
        if weight < 0:
            raise BallotParseError(f"line {lineno}: negative weight")
        names = rest.split()
        if len(set(names)) != len(names):
            raise BallotParseError(f"line {lineno}: duplicate candidate on one ballot")
        for n in names:
            try:
                check_candidate(n)
            except BallotParseError as exc:
                raise BallotParseError(f"line {lineno}: {exc}") from None
            if header is not None and n not in header:
                raise BallotParseError(f"line {lineno}: unknown candidate {n!r}")
            if n not in seen:
                seen.append(n)
        ballots.append(ApprovalBallot(weight, names))
    roster = header if header is not None else seen
    profile = normalize(ApprovalProfile(tuple(roster), tuple(ballots)))
    if profile.total_weight <= 0:
        raise BallotParseError("profile has no positive-weight ballots")
    return profile


def format_approval_profile(profile: ApprovalProfile) -> str:
    lines = ["candidates: " + " ".join(profile.roster)]
    for b in profile.ballots:
        names = " ".join(profile.sort_set(b.approved))
        lines.append(f"{fraction_str(b.weight)}: {names}".rstrip())
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ScoreBallot:
    weight: Fraction
    scores: tuple  # sorted ((candidate, score), ...) with score > 0

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        items = dict(self.scores).items() if not isinstance(self.scores, Mapping) else self.scores.items()
        object.__setattr__(self, "scores", tuple(sorted((c, int(s)) for c, s in items if int(s) != 0)))
        if self.weight < 0:
            raise ValueError("ballot weight must be nonnegative")

    def score(self, candidate: Candidate) -> int:
        return dict(self.scores).get(candidate, 0)


@dataclass(frozen=True)
class ScoreProfile:
    roster: tuple
    ballots: tuple
    max_score: int

    def __post_init__(self):
        if self.max_score < 1:
            raise ValueError("max score must be positive")
        roster = tuple(check_candidate(c) for c in self.roster)
        ballots = tuple(b if isinstance(b, ScoreBallot) else ScoreBallot(*b) for b in self.ballots)
        known = set(roster)
        for b in ballots:
            for c, s in b.scores:
                if c not in known:
                    raise ValueError(f"scored candidate {c!r} not in roster")
                if not 0 <= s <= self.max_score:
                    raise ValueError(f"score {s} for {c} outside [0, {self.max_score}]")
        object.__setattr__(self, "roster", roster)
        object.__setattr__(self, "ballots", ballots)

    @property
    def total_weight(self) -> Fraction:
        return sum((b.weight for b in self.ballots), Fraction(0))

    def score_totals(self) -> dict:
        totals = {c: Fraction(0) for c in self.roster}
        for b in self.ballots:
            for c, s in b.scores:
                totals[c] += b.weight * s
        return totals

    def approval_image(self) -> ApprovalProfile:
        """Approval profile of the KPT image, with each ballot's parts merged."""
        from .transforms import kpt_expand_profile

        return kpt_expand_profile(self)

    def sort_set(self, candidates: Iterable[Candidate]) -> tuple:
        order = {c: i for i, c in enumerate(self.roster)}
        return tuple(sorted(candidates, key=order.__getitem__))

    def __str__(self) -> str:
        return format_score_profile(self)


def normalize_scores(profile: ScoreProfile) -> ScoreProfile:
    merged: Counter = Counter()
    for b in profile.ballots:
        if b.weight:
            merged[b.scores] += b.weight
    order = {c: i for i, c in enumerate(profile.roster)}

    def key(item):
        return tuple(sorted((order[c], -s) for c, s in item[0]))

    ballots = tuple(ScoreBallot(w, dict(s)) for s, w in sorted(merged.items(), key=key))
    return ScoreProfile(profile.roster, ballots, profile.max_score)


def parse_score_profile(text: str) -> ScoreProfile:
    """Parse a ``maxscore: m`` header followed by ``WEIGHT: CAND=s CAND=s`` lines."""
    max_score = None
    header = None
    ballots = []
    seen: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, rest = _split_header(line)
        if not sep:
            raise BallotParseError(f"line {lineno}: expected 'WEIGHT: CAND=SCORE ...'")
        if head.lower() == "maxscore":
            try:
                max_score = int(rest.strip())
            except ValueError:
                raise BallotParseError(f"line {lineno}: malformed max score") from None
            if max_score < 1:
                raise BallotParseError(f"line {lineno}: max score must be positive")
            continue
        if head.lower() == "candidates":
            header = _roster_header(rest, lineno)
            continue
        if max_score is None:
            raise BallotParseError("missing 'maxscore: m' header before ballots")
        weight = as_fraction(head)
        if weight < 0:
            raise BallotParseError(f"line {lineno}: negative weight")
        scores = {}
        for item in rest.split():
            name, eq, value = item.partition("=")
            if not eq:
                raise BallotParseError(f"line {lineno}: expected CAND=SCORE, got {item!r}")
            check_candidate(name)
            if name in scores:
                raise BallotParseError(f"line {lineno}: duplicate candidate {name!r}")
            if header is not None and name not in header:
                raise BallotParseError(f"line {lineno}: unknown candidate {name!r}")
            try:
                s = int(value)
            except ValueError:
                raise BallotParseError(f"line {lineno}: malformed score {value!r}") from None
            if not 0 <= s <= max_score:
                raise BallotParseError(f"line {lineno}: score {s} outside [0, {max_score}]")
            scores[name] = s
            if name not in seen:
                seen.append(name)
        ballots.append(ScoreBallot(weight, scores))
    if max_score is None:
        raise BallotParseError("missing 'maxscore: m' header")
    roster = header if header is not None else seen
    profile = normalize_scores(ScoreProfile(tuple(roster), tuple(ballots), max_score))
    if profile.total_weight <= 0:
        raise BallotParseError("profile has no positive-weight ballots")
    return profile


def format_score_profile(profile: ScoreProfile) -> str:
    lines = [f"maxscore: {profile.max_score}", "candidates: " + " ".join(profile.roster)]
    order = {c: i for i, c in enumerate(profile.roster)}
    for b in profile.ballots:
        items = sorted(b.scores, key=lambda cs: order[cs[0]])
        body = " ".join(f"{c}={s}" for c, s in items)
        lines.append(f"{fraction_str(b.weight)}: {body}".rstrip())
    return "\n".join(lines) + "\n"


def load_profile(text: str):
    """Dispatch on the presence of a ``maxscore:`` header."""
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            if line.lower().startswith("maxscore"):
                return parse_score_profile(text)
    return parse_approval_profile(text)


@dataclass(frozen=True)
class ElectionConfig:
    seats: int
    cfat_fraction: Fraction = Fraction(1, 2)
    removal: str = "greedy"
    granularity: int = 6
    search: str = "exhaustive"
    enumeration_guard: int = 10**7
    exact_guard: int = 10**6

    def __post_init__(self):
        object.__setattr__(self, "cfat_fraction", as_fraction(self.cfat_fraction))
        if not isinstance(self.seats, int) or self.seats < 1:
            raise ValueError("seats must be a positive integer")
        if not 0 <= self.cfat_fraction <= Fraction(1, 2):
            raise ValueError("cfat fraction must lie in [0, 1/2]")
        if self.removal not in REMOVAL_MODES:
            raise ValueError(f"removal must be one of {REMOVAL_MODES}")
        if self.search not in SEARCH_MODES:
            raise ValueError(f"search must be one of {SEARCH_MODES}")
        if self.granularity < 1:
            raise ValueError("granularity must be >= 1")

    def echo(self) -> dict:
        return {
            "seats": self.seats,
            "cfat_fraction": fraction_str(self.cfat_fraction),
            "removal": self.removal,
            "granularity": self.granularity,
            "search": self.search,
        }


@dataclass(frozen=True)
class SetEvaluation:
    """Quality record of one candidate set.  Approval totals count only
    approvals of members of ``candidates``."""

    candidates: tuple
    objective: Fraction
    approvals_after: Fraction
    approvals_before: Fraction
    removed: tuple = ()  # (ballot index, candidate, removed weight)

    def key(self):
        return (self.objective, -self.approvals_after, -self.approvals_before)


@dataclass(frozen=True)
class ElectionResult:
    method: str
    winners: tuple
    score: Fraction
    evaluation: SetEvaluation | None = None
    tie_trace: tuple = ()
    notes: tuple = field(default=())

    def winner_set(self) -> frozenset:
        return frozenset(self.winners)
