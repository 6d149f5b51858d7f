from fractions import Fraction

import pytest
from hypothesis import given

from pamsac.core import (
    ApprovalProfile,
    BallotParseError,
    ElectionConfig,
    ScoreProfile,
    as_fraction,
    format_approval_profile,
    format_score_profile,
    fraction_str,
    load_profile,
    normalize,
    parse_approval_profile,
    parse_score_profile,
)

from conftest import P, profiles


def test_parse_merges_and_orders():
    p = parse_approval_profile("# comment\n1: A B\n2: C\n1: B A\n\n1/2: C\n")
    assert p.roster == ("A", "B", "C")
    assert [(b.weight, b.approved) for b in p.ballots] == [
        (Fraction(2), frozenset("AB")),
        (Fraction(5, 2), frozenset("C")),
    ]


def test_roster_header_and_empty_ballot():
    p = parse_approval_profile("candidates: X Y Z\n3:\n1: Z\n")
    assert p.roster == ("X", "Y", "Z")
    assert p.approved_candidates() == ("Z",)
    assert p.total_weight == 4


@pytest.mark.parametrize(
    "text",
    [
        "A B\n",
        "x: A\n",
        "-1: A\n",
        "1: A A\n",
        "candidates: A\n1: B\n",
        "1: A\ncandidates: A\n",
        "0: A\n",
        "",
    ],
)
def test_parse_errors(text):
    with pytest.raises(BallotParseError):
        parse_approval_profile(text)


def test_decimal_weights_are_exact():
    assert as_fraction("0.1") == Fraction(1, 10)
    with pytest.raises(TypeError):
        as_fraction(0.1)
    assert fraction_str(Fraction(31, 12)) == "31/12"
    assert fraction_str(Fraction(4)) == "4"


@given(profiles())
def test_format_parse_round_trip(profile):
    if profile.total_weight == 0:
        return
    again = parse_approval_profile(format_approval_profile(profile))
    assert again == normalize(profile)


@given(profiles())
def test_normalize_idempotent(profile):
    once = normalize(profile)
    assert normalize(once) == once
    assert once.total_weight == profile.total_weight


def test_score_profile_parse_and_format():
    text = "maxscore: 5\n1: A=5 B=4 C=2\n2: B=1\n"
    p = parse_score_profile(text)
    assert p.max_score == 5
    assert p.score_totals() == {"A": 5, "B": 6, "C": 2}
    assert parse_score_profile(format_score_profile(p)) == p
    assert isinstance(load_profile(text), ScoreProfile)
    assert isinstance(load_profile("1: A\n"), ApprovalProfile)


@pytest.mark.parametrize("text", ["1: A=1\n", "maxscore: 3\n1: A=4\n", "maxscore: 3\n1: A\n", "maxscore: 0\n"])
def test_score_parse_errors(text):
    with pytest.raises(BallotParseError):
        parse_score_profile(text)


def test_approval_image_of_kpt():
    p = parse_score_profile("maxscore: 2\n2: A=2 B=1\n")
    assert p.approval_image() == P([(1, "AB"), (1, "A")], roster=("A", "B"))


def test_config_validation_and_echo():
    cfg = ElectionConfig(3, "1/4", "exact", 2)
    assert cfg.echo() == {
        "seats": 3,
        "cfat_fraction": "1/4",
        "removal": "exact",
        "granularity": 2,
        "search": "exhaustive",
    }
    for bad in (dict(seats=0), dict(seats=2, cfat_fraction="3/4"), dict(seats=2, removal="some"), dict(seats=2, granularity=0)):
        with pytest.raises(ValueError):
            ElectionConfig(**bad)


def test_profile_rejects_unknown_candidates():
    with pytest.raises(ValueError):
        ApprovalProfile(("A",), ((1, "B"),))
