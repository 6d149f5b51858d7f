from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pamsac.core import ApprovalProfile

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

P = ApprovalProfile.from_pairs

LETTERS = "ABCDEF"


@st.composite
def profiles(draw, max_candidates=5, max_ballots=6, max_weight=4):
    n = draw(st.integers(2, max_candidates))
    roster = tuple(LETTERS[:n])
    ballots = draw(
        st.lists(
            st.tuples(st.integers(1, max_weight), st.sets(st.sampled_from(roster))),
            min_size=1,
            max_size=max_ballots,
        )
    )
    return ApprovalProfile.from_pairs(ballots, roster=roster)


@st.composite
def profile_and_set(draw, max_candidates=5, max_ballots=6, max_seats=3):
    profile = draw(profiles(max_candidates, max_ballots))
    pool = profile.approved_candidates()
    if not pool:
        profile = ApprovalProfile.from_pairs([(1, profile.roster[:1])], roster=profile.roster)
        pool = profile.approved_candidates()
    k = draw(st.integers(1, min(max_seats, len(pool))))
    committee = draw(st.lists(st.sampled_from(pool), min_size=k, max_size=k, unique=True))
    return profile, profile.sort_set(committee)


@st.composite
def party_profiles(draw, max_parties=4, max_seats=10, max_weight=12):
    parties = draw(st.integers(1, max_parties))
    seats = draw(st.integers(1, max_seats))
    weights = draw(st.lists(st.integers(1, max_weight), min_size=parties, max_size=parties))
    return weights, seats


def party_profile(weights, seats):
    """Party p fields ``seats`` candidates named ``p0 .. p{seats-1}``."""
    pairs = []
    roster = []
    for p, w in enumerate(weights):
        names = [f"P{p}x{j}" for j in range(seats)]
        roster.extend(names)
        pairs.append((w, names))
    return ApprovalProfile.from_pairs(pairs, roster=roster)


def seat_counts(winners, parties):
    return {p: sum(1 for c in winners if c.startswith(f"P{p}x")) for p in range(parties)}


@pytest.fixture
def textbook():
    def build(x):
        return P([(x, "ABC"), (x, "ABD"), (1, "C"), (1, "D")])

    return build


F = Fraction


# acceptance reporting: one line per criterion in the terminal summary

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
