import random
from fractions import Fraction

import pytest

from irvaudit.assertions import (NEB, NEN, Assertion, AssertionSet, ScoredAssertion,
                                 assertion_holds, assorter_mean, assorter_value, margin,
                                 margin_from_tallies, parse_assertion_text,
                                 write_assertion_text)
from irvaudit.ballots import VoteRecord
from irvaudit.tabulation import ProfileTallies, first_pref_count, max_mentions_excluding

from oracles import all_elimination_orders, concentrated_profile, random_profile


def rec(*ranking):
    rec.counter += 1
    return VoteRecord(f"b{rec.counter}", ranking)


rec.counter = 0

L, W, X, Y = 0, 1, 2, 3
NEB_LW = Assertion(NEB, winner=W, loser=L)


def test_assertion_invariants():
    with pytest.raises(ValueError):
        Assertion(NEB, winner=W, loser=W)
    with pytest.raises(ValueError):
        Assertion(NEB, winner=W, loser=L, context=frozenset({X}))
    with pytest.raises(ValueError):
        Assertion(NEN, winner=W, loser=L, context=frozenset({W}))
    with pytest.raises(ValueError):
        Assertion("XYZ", winner=W, loser=L)


def test_neb_assorter_examples():
    assert assorter_value(NEB_LW, rec(W, L)) == 1
    assert assorter_value(NEB_LW, rec(X, L, W)) == 0
    assert assorter_value(NEB_LW, rec(X, W, L)) == Fraction(1, 2)
    assert assorter_value(NEB_LW, rec()) == Fraction(1, 2)
    assert assorter_value(NEB_LW, rec(L)) == 0


def test_nen_assorter_examples():
    a = Assertion(NEN, winner=15, loser=17, context=frozenset({16, 18}))
    assert assorter_value(a, VoteRecord("m", (16, 18))) == Fraction(1, 2)  # exhausted
    assert assorter_value(a, VoteRecord("m", (16, 15))) == 1
    assert assorter_value(a, VoteRecord("m", (18, 17, 15))) == 0
    b = Assertion(NEN, winner=15, loser=17, context=frozenset())
    assert assorter_value(b, VoteRecord("m", (16, 15))) == Fraction(1, 2)  # 16 standing


def test_assorter_range_property():
    rng = random.Random(4)
    for _ in range(100):
        contest, records = random_profile(rng, 4, 20)
        cands = sorted(contest.roster)
        w, l = rng.sample(cands, 2)
        rest = [c for c in cands if c not in (w, l)]
        ctx = frozenset(rng.sample(rest, rng.randint(0, len(rest))))
        for a in (Assertion(NEB, winner=w, loser=l),
                  Assertion(NEN, winner=w, loser=l, context=ctx)):
            for r in records:
                assert assorter_value(a, r) in (Fraction(0), Fraction(1, 2), Fraction(1))


def test_mean_and_boundary():
    assert assorter_mean(NEB_LW, [rec(W), rec(W)]) == 1
    values_half = [rec(W), rec(L)]  # one 1, one 0
    assert assorter_mean(NEB_LW, values_half) == Fraction(1, 2)
    assert not assertion_holds(NEB_LW, values_half)  # strictly greater required
    assert assertion_holds(NEB_LW, [rec(W)])
    with pytest.raises(ValueError):
        assorter_mean(NEB_LW, [])


def test_mean_matches_bruteforce():
    rng = random.Random(8)
    for _ in range(50):
        contest, records = random_profile(rng, 3, rng.randint(1, 40))
        a = Assertion(NEB, winner=1, loser=0)
        brute = sum(assorter_value(a, r) for r in records) / Fraction(len(records))
        assert assorter_mean(a, records) == brute


def test_margin_examples():
    assert margin(NEB_LW, [rec(W), rec(W), rec(L)]) == 1
    assert margin(NEB_LW, [rec(), rec()]) == 0
    assert margin(NEB_LW, [rec(W), rec(L)]) == 0


def test_margin_positive_iff_holds():
    rng = random.Random(15)
    for _ in range(200):
        contest, records = random_profile(rng, 3, rng.randint(1, 30))
        a = Assertion(NEN, winner=0, loser=1, context=frozenset({2}))
        assert (margin(a, records) > 0) == assertion_holds(a, records)


def test_neb_margin_identity():
    rng = random.Random(16)
    for _ in range(100):
        contest, records = random_profile(rng, 4, rng.randint(1, 50))
        w, l = rng.sample(sorted(contest.roster), 2)
        a = Assertion(NEB, winner=w, loser=l)
        assert margin(a, records) == (first_pref_count(records, w)
                                      - max_mentions_excluding(records, l, w))


def test_margin_from_tallies_agrees():
    rng = random.Random(17)
    for _ in range(100):
        contest, records = concentrated_profile(rng, 4, rng.randint(1, 60))
        tallies = ProfileTallies(records)
        cands = sorted(contest.roster)
        w, l = rng.sample(cands, 2)
        rest = [c for c in cands if c not in (w, l)]
        ctx = frozenset(rng.sample(rest, rng.randint(0, len(rest))))
        for a in (Assertion(NEB, winner=w, loser=l),
                  Assertion(NEN, winner=w, loser=l, context=ctx)):
            assert margin_from_tallies(a, tallies) == margin(a, records)


def _neb_sound_on(records):
    """If NEB holds, the winner is never eliminated before the loser on any
    tie-break path."""
    rankings = [r.ranking for r in records]
    cands = sorted({c for r in rankings for c in r} | {0, 1})
    orders = all_elimination_orders(rankings, cands)
    for w in cands:
        for l in cands:
            if w == l:
                continue
            a = Assertion(NEB, winner=w, loser=l)
            if assertion_holds(a, records):
                for order in orders:
                    w_pos = order.index(w)
                    l_pos = order.index(l)
                    # winner eliminated strictly before loser contradicts NEB
                    assert not (w_pos < len(order) - 1 and w_pos < l_pos), (
                        f"NEB({l},{w}) holds but order {order} eliminates {w} first")


def _nen_sound_on(records, roster):
    """If NEN holds, no path eliminates exactly its context then its winner
    while its loser stands."""
    rankings = [r.ranking for r in records]
    cands = sorted(roster)
    orders = all_elimination_orders(rankings, cands)
    for order in orders:
        for step in range(len(order) - 1):
            eliminated_before = frozenset(order[:step])
            target = order[step]
            for standing_rival in order[step + 1:]:
                a = Assertion(NEN, winner=target, loser=standing_rival,
                              context=eliminated_before)
                if assertion_holds(a, records):
                    raise AssertionError(
                        f"NEN {a.token()} holds yet {order} eliminates {target} "
                        f"at step {step}")


def test_semantic_soundness_small_scale():
    rng = random.Random(99)
    for _ in range(150):
        n_cand = rng.randint(2, 4)
        contest, records = random_profile(rng, n_cand, rng.randint(1, 8))
        _neb_sound_on(records)
        _nen_sound_on(records, contest.roster)


def test_semantic_soundness_larger_profiles():
    rng = random.Random(100)
    for _ in range(300):
        contest, records = concentrated_profile(rng, rng.randint(3, 5), rng.randint(10, 120))
        _neb_sound_on(records)
        _nen_sound_on(records, contest.roster)


def test_assertion_file_round_trip():
    aset = AssertionSet("da19", 18, [
        ScoredAssertion(Assertion(NEB, winner=15, loser=16), 120, Fraction(3, 5), 42.0),
        ScoredAssertion(Assertion(NEN, winner=15, loser=17, context=frozenset({16, 18})),
                        55, Fraction(11, 20), 99.0),
    ])
    text = write_assertion_text(aset)
    assert "NEB,16,15" in text
    assert "NEN,15,17,{16,18}" in text
    assert "MARGIN,120" in text
    assert "MEAN,3/5" in text
    parsed = parse_assertion_text(text)
    assert parsed.contest_id == "da19"
    assert parsed.reported_winner == 18
    assert [sa.assertion for sa in parsed.assertions] == aset.plain()
    assert [sa.margin for sa in parsed.assertions] == [120, 55]
    assert [sa.mean for sa in parsed.assertions] == [Fraction(3, 5), Fraction(11, 20)]


def test_explanations_match_published_phrasing():
    nen = Assertion(NEN, winner=15, loser=19, context=frozenset({16, 17}))
    assert nen.explanation() == \
        "Candidate 15 cannot be eliminated next when {16, 17} are eliminated."
    neb = Assertion(NEB, winner=15, loser=16)
    assert neb.explanation() == "Candidate 15 cannot be eliminated before 16."
