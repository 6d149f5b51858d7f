import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pamsac.core import ElectionResult
from pamsac.criteria import (
    FactionProfileSpec,
    FactionSizeList,
    check_pr,
    check_strong_pr,
    clone_block_family,
    dominance_pairs,
    dump_counterexamples,
    faction_dominates,
    probe_monotonicity,
    probe_participation,
    scan_positive_support,
    textbook_family,
)
from pamsac.methods import METHODS, get_method
from pamsac.rivals import dhondt_apportion

from conftest import P

pamsac = get_method("pamsac")


def first_w(profile, seats):
    """Stub ignoring approvals entirely."""
    return ElectionResult("stub", profile.roster[:seats], Fraction(0))


def test_spec_validation():
    with pytest.raises(ValueError):
        FactionProfileSpec([(1, "AB"), (1, "BC")])
    with pytest.raises(ValueError):
        FactionProfileSpec([(0, "AB")])
    with pytest.raises(ValueError):
        FactionProfileSpec([(1, "AB")], "A")
    spec = FactionProfileSpec([(2, "DEF"), (1, "G")], "ABC")
    assert spec.profile() == P([(2, "ABCDEF"), (1, "ABCG")], roster="ABCDEFG")
    assert spec.floors(3) == (2, 1)


def test_sav_fails_pr():
    rep = check_pr(get_method("sav"), FactionProfileSpec([(1, "ABCDEF"), (1, "GHIJ")]), 6)
    assert not rep.passed
    assert rep.allocation == (2, 4) and rep.floors == (3, 3)


def test_single_faction_trivially_passes():
    assert check_pr(first_w, FactionProfileSpec([(3, "ABC")]), 3).passed


def test_pr_needs_enough_candidates():
    with pytest.raises(ValueError):
        check_pr(pamsac, FactionProfileSpec([(5, "A"), (1, "BCD")]), 3)


def test_pr_rejects_universal_block():
    with pytest.raises(ValueError):
        check_pr(pamsac, FactionProfileSpec([(1, "B")], "A"), 2)


def _random_spec(rng, universal=""):
    letters = iter("HIJKLMNOPQRSTUVWXYZ")
    factions = []
    for _ in range(rng.randint(2, 3)):
        factions.append((rng.randint(1, 6), "".join(next(letters) for _ in range(4))))
    return FactionProfileSpec(factions, universal)


@pytest.mark.parametrize("seed", range(12))
def test_pamsac_passes_pr_on_random_specs(seed):
    rng = random.Random(seed)
    spec = _random_spec(rng)
    seats = rng.randint(1, 4)
    rep = check_pr(pamsac, spec, seats)
    assert rep.passed
    app = dhondt_apportion({i: w for i, (w, _) in enumerate(spec.factions)}, seats)
    assert dict(enumerate(rep.allocation)) in app.alternatives()


def test_strong_pr():
    spec = FactionProfileSpec([(2, "DEF"), (1, "G")], "ABC")
    assert not check_strong_pr(get_method("pav-dhondt"), spec, 6).passed
    rep = check_strong_pr(get_method("pamsac", cfat_fraction=0), spec, 6)
    assert rep.passed and rep.winners == tuple("ABCDEG")
    assert check_strong_pr(pamsac, spec, 6).passed
    assert check_strong_pr(get_method("ebert"), spec, 6).passed
    with pytest.raises(ValueError):
        check_strong_pr(pamsac, FactionProfileSpec([(1, "D")]), 2)


def test_universal_candidate_breaks_tie_toward_abc():
    r = get_method("pamsac", cfat_fraction=0)(P([(3, "ABC"), (1, "AD")]), 3)
    assert r.winners == ("A", "B", "C")
    bare = get_method("pamsac", cfat_fraction=0)(P([(3, "BC"), (1, "D")]), 2)
    assert bare.tie_trace[0] == ("objective", 3)


def test_faction_dominates():
    assert faction_dominates((1, 1, 1), (2, 2, 1))
    assert not faction_dominates((1, 1, 1), (1, 1, 1))
    assert not faction_dominates((2, 1), (1, 2))  # sorted to (2, 1) both: equal
    assert not faction_dominates((3, 1), (2, 2))
    assert FactionSizeList((1, 3, 2)).sizes == (3, 2, 1)
    with pytest.raises(ValueError):
        faction_dominates((1,), (1, 1))


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4))
def test_dominance_is_irreflexive(sizes):
    assert not faction_dominates(sizes, sizes)


def test_dominance_pairs():
    assert set(dominance_pairs(P([(1, "AB"), (1, "AC")]))) == {("A", "B"), ("A", "C")}


def test_probe_finds_ebert_failure():
    found = probe_monotonicity(get_method("ebert"), seed=0, trials=60)
    assert found
    assert all(set(e.to_json()) == {"kind", "profile", "seats", "before", "after", "detail"} for e in found)


def test_probe_stub_never_loses_a_candidate_by_approval():
    found = probe_monotonicity(first_w, seed=1, trials=100)
    assert not [e for e in found if e.kind == "added-approval"]
    # ignoring approvals does break the dominance clause
    assert {e.kind for e in found} == {"dominance"}


def test_probe_pamsac_small():
    assert probe_monotonicity(pamsac, seed=7, trials=40) == []


def test_probes_are_deterministic():
    ebert = get_method("ebert")
    assert probe_monotonicity(ebert, 3, 30) == probe_monotonicity(ebert, 3, 30)


def test_participation_probe():
    assert probe_participation(get_method("pav-dhondt"), seed=0, trials=100) == []
    assert probe_participation(first_w, seed=0, trials=20) == []


def test_dump(tmp_path):
    found = probe_monotonicity(get_method("ebert"), seed=0, trials=20)
    path = tmp_path / "cx.json"
    dump_counterexamples(found, path)
    assert len(json.loads(path.read_text())) == len(found)


def test_textbook_crossovers():
    fam = textbook_family()
    rep = scan_positive_support(pamsac, fam, range(1, 8))
    assert rep.crossover == 3 and 3 in rep.ties
    assert scan_positive_support(get_method("ebert"), fam, range(1, 30)).crossover is None
    assert scan_positive_support(get_method("monroe"), fam, range(1, 30)).crossover is None


def test_clone_block_crossover():
    fam = clone_block_family()
    assert pamsac(fam.build(0), 3).winners == tuple("ABC")
    rep = scan_positive_support(pamsac, fam, range(0, 30))
    assert rep.crossover is not None
    assert all(w == tuple("DEF") for x, w in rep.winners if x >= rep.crossover)


def test_registry():
    assert set(METHODS) == {"pamsac", "pamsack", "sav", "pav-dhondt", "pav-sl", "monroe", "cc", "ebert", "minimax"}
    with pytest.raises(KeyError):
        get_method("plurality")
