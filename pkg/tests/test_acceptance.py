"""Acceptance criteria 1-16, each at exact rational tolerance and within its
time budget.  Every test records one PASS/FAIL line, printed in the pytest
terminal summary."""

import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations

import pytest

from pamsac.core import ApprovalProfile, ElectionConfig, GuardExceeded, ScoreBallot, ScoreProfile
from pamsac.criteria import dominance_pairs, probe_monotonicity, probe_participation
from pamsac.loads import cfat_objective, ebert_sum_squared, party_load_formula, variance_objective
from pamsac.methods import get_method
from pamsac.removal import exact_removal, greedy_removal
from pamsac.rivals import (
    all_scores,
    cc_score,
    cc_tally,
    dhondt_apportion,
    ebert_tally,
    monroe_score,
    monroe_tally,
    pav_tally,
    sainte_lague_apportion,
    sav_score,
    sav_tally,
)
from pamsac.tally import decided_at, evaluate_set, tally, tally_score
from pamsac.transforms import cfat_expand_profile

from conftest import ACCEPTANCE_LINES, P, party_profile, seat_counts

HALF = Fraction(1, 2)


@contextmanager
def criterion(n, title, budget):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
    except BaseException as exc:
        ACCEPTANCE_LINES.append(f"criterion {n}: FAIL  {title}  ({type(exc).__name__}: {str(exc)[:80]})")
        raise
    ACCEPTANCE_LINES.append(f"criterion {n}: PASS  {title}  ({time.perf_counter() - start:.2f}s)")


def textbook(x, n=1):
    return P([(x * n, "ABC"), (x * n, "ABD"), (n, "C"), (n, "D")])


def test_c01_sav_failure():
    with criterion(1, "SAV elects ABGHIJ", 1):
        n = 6
        p = P([(n, "ABCDEF"), (n, "GHIJ")])
        r = sav_tally(p, 6)
        assert r.winners == tuple("ABGHIJ")
        assert r.score == Fraction(4, 3) * n
        assert sav_score(p, "ABCGHI") == Fraction(5, 4) * n


def test_c02_pav_strong_pr_failure():
    with criterion(2, "PAV fails strong PR and partial agreement", 5):
        assert pav_tally(P([(2, "ABCDEF"), (1, "ABCG")]), 6).winners == tuple("ABCDEF")
        u = [f"U{i}" for i in range(1, 11)]
        a = [f"A{i}" for i in range(1, 4)]
        b = [f"B{i}" for i in range(1, 4)]
        c = [f"C{i}" for i in range(1, 7)]
        p = P([(2, u + a), (2, u + b), (1, c)], roster=u + a + b + c)
        expected = set(u + a[:2] + b[:2] + c)
        assert set(pav_tally(p, 20).winners) == expected


def test_c03_pav_partial_agreement():
    with criterion(3, "PAV 5-seat partial agreement", 1):
        p = P([(1, ["U1", "U2", "A1"]), (1, ["U1", "U2", "B1"]), (1, ["C1", "C2"]), (1, ["D1", "D2"])])
        w = set(pav_tally(p, 5).winners)
        assert {"U1", "U2", "C1", "D1"} <= w
        assert len(w & {"C2", "D2"}) == 1 and not w & {"A1", "B1"}


def test_c04_ebert_raw():
    with criterion(4, "Ebert raw elects BC; CD on textbook x=1..50", 5):
        p = P([(1, "AB"), (1, "AC")])
        r = ebert_tally(p, 2)
        assert r.winners == ("B", "C") and r.score == 2
        assert ebert_sum_squared(p, "AB") == Fraction(5, 2)
        for x in range(1, 51):
            assert ebert_tally(textbook(x), 2).winners == ("C", "D"), x


def test_c05_monroe_cc():
    with criterion(5, "Monroe and CC elect CD; six-way full tie", 5):
        for x in range(1, 21):
            assert monroe_tally(textbook(x), 2).winners == ("C", "D"), x
            assert cc_tally(textbook(x), 2).winners == ("C", "D"), x
        p = P([(1, "ABC"), (1, "ABD")])
        for score in (lambda w: monroe_score(p, w), lambda w: cc_score(p, w)):
            values = all_scores(p, 2, score)
            assert len(values) == 6 and set(values.values()) == {2}


def _random_parties(rng):
    parties = rng.randint(1, 4)
    seats = rng.randint(1, 10)
    return [rng.randint(1, 12) for _ in range(parties)], seats


def _allocation_objective(weights, alloc, fraction):
    return sum(
        (party_load_formula(s, w) if fraction else Fraction(s * s) / w for w, s in zip(weights, alloc.values())),
        Fraction(0),
    )


def test_c06_sainte_lague_equivalence():
    with criterion(6, "Ebert raw = Sainte-Lague on 200 party profiles", 30):
        rng = random.Random(6)
        ties = 0
        for _ in range(200):
            weights, seats = _random_parties(rng)
            profile = party_profile(weights, seats)
            got = seat_counts(ebert_tally(profile, seats).winners, len(weights))
            app = sainte_lague_apportion(dict(enumerate(weights)), seats)
            alts = app.alternatives()
            assert got in alts
            if app.tied:
                ties += 1
                values = {_allocation_objective(weights, alt, 0) for alt in alts}
                assert len(values) == 1
            else:
                assert got == app.seats
        assert ties > 0
        # the half-seat identity
        for a2, b2, k in [(3, 5, 2), (5, 1, 4), (7, 3, 6), (1, 1, 10)]:
            a, b = Fraction(a2, 2), Fraction(b2, 2)
            weights = [k * a, k * b]
            lo = {0: int(a - HALF), 1: int(b + HALF)}
            hi = {0: int(a + HALF), 1: int(b - HALF)}
            target = (a + b) * (4 * a * b + 1) / (4 * a * b * k)
            assert _allocation_objective(weights, lo, 0) == target == _allocation_objective(weights, hi, 0)
            app = sainte_lague_apportion(dict(enumerate(weights)), int(a + b))
            assert lo in app.alternatives() and hi in app.alternatives()


def test_c07_strong_pr_with_removal():
    with criterion(7, "removal gives ABCDEG at the first tie-break; ABC 9/4", 5):
        p = P([(2, "ABCDEF"), (1, "ABCG")])
        cfg = ElectionConfig(6, 0, "greedy")
        r = tally(p, cfg)
        assert r.winners == tuple("ABCDEG")
        # ABCDEF drops out at the first approval level; the three survivors
        # are the D/E/F clone variants of ABCDEG
        assert r.tie_trace[0] == ("objective", 4) and r.tie_trace[1] == ("approvals_after", 3)
        assert r.evaluation.approvals_after == 14
        rival = evaluate_set(p, "ABCDEF", cfg)
        assert rival.objective == r.score == 12
        assert rival.approvals_after < 14
        q = P([(3, "ABC"), (1, "AD")])
        r = tally(q, ElectionConfig(3, 0, "greedy"))
        assert r.winners == tuple("ABC") and r.score == Fraction(9, 4)
        assert cfat_objective(q, "ABC", 0) == Fraction(31, 12)


@pytest.mark.xfail(strict=True, reason="removal keeps 11 approvals for ABCDEF at the optimum, not 9")
def test_c07_rival_keeps_nine_approvals():
    p = P([(2, "ABCDEF"), (1, "ABCG")])
    assert evaluate_set(p, "ABCDEF", ElectionConfig(6, 0)).approvals_after == 9


def test_c08_cfat_party_formula():
    with criterion(8, "CFAT party formula s(s+1)/v for s<=8", 30):
        for s in range(1, 9):
            names = [f"c{i}" for i in range(s)]
            for j in range(1, 5):
                v = 2**s * j
                profile = P([(v, names)], roster=names)
                expanded = cfat_expand_profile(profile).as_profile(names)
                brute = ebert_sum_squared(expanded, names)
                assert brute == Fraction(s * (s + 1), v) == cfat_objective(profile, names)


def test_c09_dhondt_equivalence():
    with criterion(9, "PAMSAC = D'Hondt on 200 party profiles", 60):
        rng = random.Random(9)
        ties = 0
        for _ in range(200):
            weights, seats = _random_parties(rng)
            profile = party_profile(weights, seats)
            got = seat_counts(tally(profile, ElectionConfig(seats)).winners, len(weights))
            app = dhondt_apportion(dict(enumerate(weights)), seats)
            alts = app.alternatives()
            assert got in alts
            if app.tied:
                ties += 1
                assert len({_allocation_objective(weights, alt, HALF) for alt in alts}) == 1
            else:
                assert got == app.seats
        assert ties > 0
        for a, b, k in [(2, 3, 1), (3, 1, 2), (4, 4, 3)]:
            weights = [k * a, k * b]
            seats = a + b - 1
            profile = party_profile(weights, seats)
            names = profile.roster
            first = [c for c in names if c.startswith("P0x")]
            second = [c for c in names if c.startswith("P1x")]
            one = tally(profile, ElectionConfig(seats))
            for sa, sb in [(a, b - 1), (a - 1, b)]:
                assert cfat_objective(profile, first[:sa] + second[:sb]) == Fraction(a + b, k)
            assert one.score == Fraction(a + b, k)


def test_c10_textbook_crossover():
    with criterion(10, "textbook: CD at 2, knife-edge AB at 3, AB at 4; 3 vs 4", 1):
        cfg = ElectionConfig(2)
        assert tally(textbook(2), cfg).winners == ("C", "D")
        r = tally(textbook(3), cfg)
        assert r.winners == ("A", "B")
        assert r.tie_trace[0] == ("objective", 2)
        ab, cd = evaluate_set(textbook(3), "AB", cfg), evaluate_set(textbook(3), "CD", cfg)
        assert ab.objective == cd.objective and ab.removed == () and cd.removed == ()
        assert decided_at(r.tie_trace) == 1  # first approval tie-break
        assert tally(textbook(4), cfg).winners == ("A", "B")
        p = P([(1, "ABC"), (1, "ABD")])
        assert cfat_objective(p, "AB") == 3 and cfat_objective(p, "CD") == 4


def _random_approval(rng, cands=5, ballots=6):
    roster = tuple("ABCDEF"[:cands])
    pairs = [(rng.randint(1, 5), [c for c in roster if rng.random() < 0.4]) for _ in range(rng.randint(1, ballots))]
    return ApprovalProfile.from_pairs(pairs, roster=roster)


def _random_scores(rng, m, cands=4, ballots=4):
    roster = tuple("ABCD"[:cands])
    rows = []
    for _ in range(rng.randint(1, ballots)):
        rows.append(ScoreBallot(rng.randint(1, 4), {c: rng.randint(0, m) for c in roster}))
    return ScoreProfile(roster, tuple(rows), m)


def test_c11_single_winner_reductions():
    with criterion(11, "one seat: approval and score argmax on 500 profiles", 60):
        rng = random.Random(11)
        checked = 0
        while checked < 500:
            p = _random_approval(rng)
            totals = p.approval_weights()
            if not any(totals.values()):
                continue
            best = max(totals.values())
            assert tally(p, ElectionConfig(1)).winners == (next(c for c in p.roster if totals[c] == best),)
            sp = _random_scores(rng, rng.randint(1, 5))
            sums = sp.score_totals()
            if any(sums.values()):
                top = max(sums.values())
                want = next(c for c in sp.roster if sums[c] == top)
                assert tally_score(sp, ElectionConfig(1)).winners == (want,)
            checked += 1


def test_c12_kpt_scale_invariance():
    with criterion(12, "PAMSACK winners unchanged by doubling scores", 60):
        rng = random.Random(12)
        done = 0
        while done < 100:
            sp = _random_scores(rng, rng.randint(1, 3), cands=4, ballots=3)
            seats = rng.randint(1, 2)
            if sum(1 for v in sp.score_totals().values() if v) < seats:
                continue
            doubled = ScoreProfile(
                sp.roster,
                tuple(ScoreBallot(b.weight, {c: 2 * s for c, s in b.scores}) for b in sp.ballots),
                2 * sp.max_score,
            )
            cfg = ElectionConfig(seats)
            assert tally_score(sp, cfg).winners == tally_score(doubled, cfg).winners
            done += 1


def test_c13_objective_identity():
    with criterion(13, "variance preorder = raw preorder; raw = CFAT at 0", 30):
        rng = random.Random(13)
        done = 0
        while done < 500:
            p = _random_approval(rng)
            pool = p.approved_candidates()
            if not pool:
                continue
            k = rng.randint(1, min(3, len(pool)))
            w1, w2 = rng.sample(pool, k), rng.sample(pool, k)
            e1, e2 = ebert_sum_squared(p, w1), ebert_sum_squared(p, w2)
            v1, v2 = variance_objective(p, w1), variance_objective(p, w2)
            assert (e1 > e2) - (e1 < e2) == (v1 > v2) - (v1 < v2)
            assert cfat_objective(p, w1, 0) == e1
            done += 1


def test_c14_oracle_equivalence():
    with criterion(14, "closed form = expansion; greedy >= exact on 300 pairs", 120):
        rng = random.Random(14)
        done = 0
        while done < 300:
            p = _random_approval(rng, cands=4, ballots=4)
            pool = p.approved_candidates()
            if not pool:
                continue
            w = p.sort_set(rng.sample(pool, rng.randint(1, min(3, len(pool)))))
            expanded = cfat_expand_profile(p, w).as_profile(p.roster)
            assert cfat_objective(p, w) == ebert_sum_squared(expanded, w)
            f = rng.choice([Fraction(0), HALF])
            try:
                exact = exact_removal(p, w, f, 2, guard=300_000)
            except GuardExceeded:
                continue
            assert greedy_removal(p, w, f, 2).objective >= exact.objective
            done += 1
        for weights, seats in [([3, 2], 3), ([1, 1, 1], 2), ([4, 1], 2), ([2, 3, 1], 3)]:
            profile = party_profile(weights, seats)
            for w in combinations(profile.roster, seats):
                g = greedy_removal(profile, w, HALF, 2).objective
                assert g == exact_removal(profile, w, HALF, 2).objective == cfat_objective(profile, w)


@pytest.mark.slow
def test_c15_monotonicity_fuzz():
    with criterion(15, "10,000 monotonicity trials: PAMSAC clean, Ebert fails", 600):
        found = probe_monotonicity(get_method("pamsac"), seed=15, trials=10_000)
        assert found == [], found[:3]
        ebert = probe_monotonicity(get_method("ebert"), seed=15, trials=10_000)
        assert any(e.kind == "dominance" for e in ebert)
        p = P([(1, "AB"), (1, "AC")])
        won = ebert_tally(p, 2).winners
        assert [(a, b) for a, b in dominance_pairs(p) if b in won and a not in won]


@pytest.mark.slow
def test_c16_participation_probe(capsys):
    with criterion(16, "10,000 participation trials: PAV clean, PAMSAC reported", 600):
        assert probe_participation(get_method("pav-dhondt"), seed=16, trials=10_000) == []
        found = probe_participation(get_method("pamsac"), seed=16, trials=10_000)
        ACCEPTANCE_LINES.append(f"criterion 16: note  PAMSAC participation violations found: {len(found)}")
