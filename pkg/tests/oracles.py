"""Independent reference implementations used as test oracles.

Everything here is coded as plainly as possible, straight from the counting
rules, with no sharing of logic with the package under test.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

from irvaudit.ballots import Contest, VoteRecord


def literal_irv(rankings: list[tuple[int, ...]], candidates: list[int],
                tie_break: str = "lowest-id") -> tuple[list[int], int, list[dict[int, int]]]:
    """Literal transcription of the iterative IRV count.

    Each round recounts every ballot for its highest-ranked standing
    candidate, then eliminates the standing candidate with the smallest
    tally. Returns (elimination order, winner, per-round tallies).
    """
    standing = list(candidates)
    order = []
    rounds = []
    while len(standing) > 1:
        tally = {c: 0 for c in standing}
        for ranking in rankings:
            for preference in ranking:
                if preference in standing:
                    tally[preference] += 1
                    break
        rounds.append(dict(tally))
        low = min(tally.values())
        lows = [c for c in standing if tally[c] == low]
        if tie_break == "lowest-id":
            out = min(lows)
        elif len(lows) == 1:
            out = lows[0]
        else:
            raise ValueError("tie")
        order.append(out)
        standing.remove(out)
    return order, standing[0], rounds


def all_elimination_orders(rankings: list[tuple[int, ...]],
                           candidates: list[int]) -> set[tuple[int, ...]]:
    """Every elimination order reachable under some tie-breaking choice."""
    results: set[tuple[int, ...]] = set()

    def step(standing: tuple[int, ...], prefix: tuple[int, ...]) -> None:
        if len(standing) == 1:
            results.add(prefix + standing)
            return
        tally = {c: 0 for c in standing}
        for ranking in rankings:
            for preference in ranking:
                if preference in tally:
                    tally[preference] += 1
                    break
        low = min(tally.values())
        for c in standing:
            if tally[c] == low:
                remaining = tuple(x for x in standing if x != c)
                step(remaining, prefix + (c,))

    step(tuple(sorted(candidates)), ())
    return results


def naive_normalize(raw: list[int]) -> list[int]:
    out = []
    for c in raw:
        if c not in out:
            out.append(c)
    return out


def naive_ballot_line_tokens(line: str) -> tuple[str, list[int]]:
    """Hand-written tokenizer for `<ballot_id>,<rank>,<rank>,...` lines."""
    tokens = []
    current = ""
    for ch in line:
        if ch == ",":
            tokens.append(current)
            current = ""
        else:
            current += ch
    tokens.append(current)
    return tokens[0], [int(t) for t in tokens[1:]]


def closed_form_draws(per_draw: float, alpha: float) -> float:
    """Smallest n with (2*per_draw)^n >= 1/alpha, from the product form."""
    return math.ceil(math.log(1 / alpha) / math.log(2 * per_draw))


def neb_true(rankings: list[tuple[int, ...]], loser: int, winner: int) -> bool:
    """Direct reading of the not-eliminated-before condition."""
    firsts = sum(1 for r in rankings if r and r[0] == winner)
    mentions = 0
    for r in rankings:
        if loser in r:
            if winner in r and r.index(winner) < r.index(loser):
                continue
            mentions += 1
    return firsts > mentions


def nen_true(rankings: list[tuple[int, ...]], winner: int, loser: int,
             context: frozenset[int]) -> bool:
    """Direct tally comparison at the elimination step after `context` is out."""
    won = lost = 0
    for r in rankings:
        for c in r:
            if c in context:
                continue
            if c == winner:
                won += 1
            elif c == loser:
                lost += 1
            break
    return won > lost


# -- profile generators -------------------------------------------------------


def random_profile(rng: random.Random, n_candidates: int, n_ballots: int,
                   contest_id: str = "t") -> tuple[Contest, list[VoteRecord]]:
    candidates = list(range(n_candidates))
    records = []
    for i in range(n_ballots):
        length = rng.randint(0, n_candidates)
        ranking = tuple(rng.sample(candidates, length))
        records.append(VoteRecord(f"b{i:05d}", ranking))
    contest = Contest(contest_id, frozenset(candidates), None, max(1, n_ballots))
    return contest, records


def concentrated_profile(rng: random.Random, n_candidates: int, n_ballots: int,
                         contest_id: str = "t") -> tuple[Contest, list[VoteRecord]]:
    """Profiles biased toward a few ballot types, more like real contests."""
    candidates = list(range(n_candidates))
    n_types = rng.randint(1, max(2, min(8, math.factorial(n_candidates))))
    types = []
    for _ in range(n_types):
        length = rng.randint(1, n_candidates)
        types.append(tuple(rng.sample(candidates, length)))
    weights = [rng.random() for _ in types]
    records = []
    for i in range(n_ballots):
        ranking = rng.choices(types, weights)[0] if rng.random() > 0.05 else ()
        records.append(VoteRecord(f"b{i:05d}", ranking))
    contest = Contest(contest_id, frozenset(candidates), None, max(1, n_ballots))
    return contest, records


def exact_pvalue(values: list[Fraction]) -> Fraction:
    """Brute-force max-prefix product p-value."""
    best = Fraction(1)
    product = Fraction(1)
    for x in values:
        product = product * Fraction(x) / Fraction(1, 2)
        if product > best:
            best = product
    return Fraction(1) / best
