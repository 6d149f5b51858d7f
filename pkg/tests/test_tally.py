from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pamsac.core import ElectionConfig, GuardExceeded, InfeasibleElection, ScoreBallot, ScoreProfile
from pamsac.rivals import dhondt_apportion
from pamsac.tally import LEVELS, canonical_scores, decided_at, evaluate_set, tally, tally_score

from conftest import P, party_profile, profiles, seat_counts


def test_textbook_family(textbook):
    cfg = ElectionConfig(2)
    assert tally(textbook(2), cfg).winners == ("C", "D")
    assert tally(textbook(2), cfg).score == Fraction(4, 3)
    assert evaluate_set(textbook(2), "AB", cfg).objective == Fraction(3, 2)
    knife = tally(textbook(3), cfg)
    assert knife.winners == ("A", "B")
    assert decided_at(knife.tie_trace) == 1
    assert tally(textbook(4), cfg).winners == ("A", "B")


def test_level_names():
    assert LEVELS == ("objective", "approvals_after", "approvals_before")


def test_approvals_before_breaks_remaining_tie():
    r = tally(P([(1, "AB"), (1, "AC")]), ElectionConfig(2, 0))
    assert r.winners == ("A", "B")
    assert [n for _, n in r.tie_trace] == [3, 3, 2, 1]
    assert decided_at(r.tie_trace) == 3


def test_infeasible():
    with pytest.raises(InfeasibleElection):
        tally(P([(1, "AB"), (2, "")], roster="ABC"), ElectionConfig(3))


def test_enumeration_guard():
    names = [f"c{i}" for i in range(12)]
    p = P([(i + 1, [n]) for i, n in enumerate(names)], roster=names)
    with pytest.raises(GuardExceeded):
        tally(p, ElectionConfig(6, enumeration_guard=100))


def test_clones_counted_in_trace():
    # B, C and D are clones: three tied sets {A, x}
    r = tally(P([(2, "A"), (1, "BCD")]), ElectionConfig(2))
    assert r.winners == ("A", "B")
    assert r.tie_trace[0] == ("objective", 3)


def test_sequential_mode(textbook):
    cfg = ElectionConfig(2, search="sequential")
    r = tally(textbook(4), cfg)
    assert r.winners == ("A", "B")
    assert r.notes == ("sequential",)
    first = tally(P([(3, "A"), (2, "B"), (2, "C")]), ElectionConfig(1, search="sequential"))
    assert first.winners == ("A",)


@given(profiles(max_candidates=5, max_ballots=6))
def test_single_seat_is_approval_winner(profile):
    pool = profile.approved_candidates()
    if not pool:
        return
    totals = profile.approval_weights()
    best = max(totals[c] for c in pool)
    expected = next(c for c in profile.roster if totals[c] == best)
    assert tally(profile, ElectionConfig(1)).winners == (expected,)


@given(st.lists(st.integers(1, 9), min_size=1, max_size=3), st.integers(1, 5))
def test_party_voting_is_dhondt(weights, seats):
    profile = party_profile(weights, seats)
    result = tally(profile, ElectionConfig(seats))
    app = dhondt_apportion({i: w for i, w in enumerate(weights)}, seats)
    counts = seat_counts(result.winners, len(weights))
    assert counts in app.alternatives()


def _scores(rows, m, roster="ABC"):
    return ScoreProfile(tuple(roster), tuple(ScoreBallot(w, s) for w, s in rows), m)


def test_single_seat_score_winner():
    sp = _scores([(1, {"A": 4, "B": 2}), (2, {"B": 3, "C": 3}), (1, {"C": 4, "A": 1})], 4)
    # totals A 5, B 8, C 10
    assert tally_score(sp, ElectionConfig(1)).winners == ("C",)


def test_canonical_scores():
    sp = _scores([(1, {"A": 4, "B": 2})], 6)
    c = canonical_scores(sp)
    assert c.max_score == 3 and c.ballots[0].scores == (("A", 2), ("B", 1))
    assert canonical_scores(c) is c


@given(
    st.lists(
        st.tuples(st.integers(1, 3), st.fixed_dictionaries({x: st.integers(0, 2) for x in "ABC"})),
        min_size=1,
        max_size=3,
    ),
    st.integers(1, 2),
)
def test_score_scale_invariance(rows, seats):
    sp = _scores(rows, 2)
    if sum(1 for v in sp.score_totals().values() if v > 0) < seats:
        return
    doubled = _scores([(w, {c: 2 * v for c, v in s.items()}) for w, s in rows], 4)
    assert tally_score(sp, ElectionConfig(seats, granularity=1)).winners == tally_score(
        doubled, ElectionConfig(seats, granularity=1)
    ).winners
