"""Search for an assertion set that rules out every alternative winner.

Elimination-order suffixes are grown backward from each alternative winner.
A suffix (c_r, ..., c_k, w') covers every order ending with those steps; it
can be discharged either by a NEB assertion the suffix violates or by the
NEN assertion saying c_r cannot be the next elimination once everything
outside the suffix is gone. Best-first expansion always works on the most
expensive frontier suffix, hoping its children admit cheaper prunings; a
full-length suffix that still has no true pruning assertion means some
complete elimination order is consistent with every true assertion, and
certification is impossible.

The returned set's difficulty is the maximum over its assertions; the
search minimizes that heuristically, with no global-optimality claim.
"""
from __future__ import annotations

import heapq
import math
from fractions import Fraction
from typing import Callable, Sequence

from .assertions import (NEB, NEN, Assertion, AssertionSet, ScoredAssertion,
                         margin_from_tallies)
from .ballots import Contest, VoteRecord
from .tabulation import ProfileTallies, tabulate
from . import risk


class OutcomeMismatchError(ValueError):
    """The ballots do not tabulate to the reported winner; nothing to certify."""


class UncertifiableError(Exception):
    """Some alternative elimination order survives every true assertion."""

    def __init__(self, suffix: tuple[int, ...], reason: str = ""):
        tail = " <- ".join(str(c) for c in suffix)
        message = (f"no true assertion rules out elimination orders ending "
                   f"[... {tail}]; a full hand count is the only recourse")
        if reason:
            message += f" ({reason})"
        super().__init__(message)
        self.suffix = suffix


def sample_size_scorer(risk_limit: Fraction, mode: str) -> Callable[[int, int], float]:
    alpha = Fraction(risk_limit)

    def score(margin: int, n_records: int) -> float:
        if margin <= 0 or n_records <= 0:
            return math.inf
        if mode == "comparison":
            clean = risk.comparison_clean_value(margin, n_records)
        elif mode == "polling":
            clean = risk.polling_clean_value(margin, n_records)
        else:
            raise ValueError(f"unknown audit mode {mode!r}")
        return float(risk.closed_form_sample_size(clean, alpha))

    return score


def inverse_margin_scorer(margin: int, n_records: int) -> float:
    return math.inf if margin <= 0 else 1.0 / margin


def score_difficulty(assertion: Assertion, records: Sequence[VoteRecord], mode: str,
                     risk_limit: Fraction = Fraction(1, 20)) -> float:
    """Zero-discrepancy estimated sample size for one assertion."""
    tallies = ProfileTallies(records)
    m = margin_from_tallies(assertion, tallies)
    return sample_size_scorer(risk_limit, mode)(m, tallies.total)


class _Search:
    def __init__(self, contest: Contest, tallies: ProfileTallies,
                 scorer: Callable[[int, int], float]):
        self.roster = sorted(contest.roster)
        self.roster_set = frozenset(contest.roster)
        self.tallies = tallies
        self.n = tallies.total
        self.scorer = scorer
        self._neb_margin: dict[tuple[int, int], int] = {}

    def neb_margin(self, loser: int, winner: int) -> int:
        key = (loser, winner)
        cached = self._neb_margin.get(key)
        if cached is None:
            cached = (self.tallies.first_preferences(winner)
                      - self.tallies.mentions_without_earlier(loser, winner))
            self._neb_margin[key] = cached
        return cached

    def best_new_option(self, suffix: tuple[int, ...]) -> tuple[float, Assertion] | None:
        """Cheapest true assertion ruling out suffix[0]'s position, if any.

        Options inherited from shorter suffixes are carried separately by the
        caller; only assertions newly applicable at this suffix are scored here.
        """
        head = suffix[0]
        suffix_set = frozenset(suffix)
        best: tuple[float, tuple, Assertion] | None = None
        for other in self.roster:
            if other in suffix_set:
                continue
            m = self.neb_margin(head, other)
            if m > 0:
                a = Assertion(NEB, winner=other, loser=head)
                cand = (self.scorer(m, self.n), a.sort_key(), a)
                if best is None or cand[:2] < best[:2]:
                    best = cand
        if len(suffix) > 1:
            continuing = self.tallies.continuing(suffix_set)
            context = self.roster_set - suffix_set
            for rival in suffix[1:]:
                m = continuing[head] - continuing[rival]
                if m > 0:
                    a = Assertion(NEN, winner=head, loser=rival, context=context)
                    cand = (self.scorer(m, self.n), a.sort_key(), a)
                    if best is None or cand[:2] < best[:2]:
                        best = cand
        return None if best is None else (best[0], best[2])


def _merge(a: tuple[float, Assertion] | None,
           b: tuple[float, Assertion] | None) -> tuple[float, Assertion] | None:
    if a is None:
        return b
    if b is None:
        return a
    ka = (a[0], a[1].sort_key())
    kb = (b[0], b[1].sort_key())
    return a if ka <= kb else b


def generate_assertions(contest: Contest, records: Sequence[VoteRecord],
                        difficulty_fn: Callable[[int, int], float] | None = None,
                        *, risk_limit: Fraction = Fraction(1, 20),
                        mode: str = "comparison",
                        node_budget: int | None = None) -> AssertionSet:
    """Produce an assertion set whose joint truth forces the reported winner.

    Raises OutcomeMismatchError when the ballots do not elect the reported
    winner, and UncertifiableError when some alternative elimination order
    cannot be excluded by any true assertion (degenerate or tied profiles).
    """
    if contest.reported_winner is None:
        raise ValueError("contest has no reported winner")
    roster = sorted(contest.roster)
    if len(roster) < 2:
        raise UncertifiableError((), reason="single-candidate contest, nothing to exclude")
    outcome = tabulate(contest, records)
    if outcome.winner != contest.reported_winner:
        raise OutcomeMismatchError(
            f"ballots tabulate to {outcome.winner}, not the reported "
            f"winner {contest.reported_winner}"
        )
    scorer = difficulty_fn or sample_size_scorer(risk_limit, mode)
    tallies = ProfileTallies(records)
    search = _Search(contest, tallies, scorer)
    full_len = len(roster)

    heap: list[tuple[float, tuple[int, ...], tuple[float, Assertion] | None]] = []
    for alt in roster:
        if alt == contest.reported_winner:
            continue
        suffix = (alt,)
        best = search.best_new_option(suffix)
        cost = math.inf if best is None else best[0]
        heapq.heappush(heap, (-cost, suffix, best))

    chosen: dict[Assertion, float] = {}
    forced = 0.0
    expansions = 0
    while heap:
        neg_cost, suffix, best = heapq.heappop(heap)
        cost = -neg_cost
        within_budget = node_budget is None or expansions < node_budget
        expandable = len(suffix) < full_len and within_budget
        if cost <= forced or not expandable:
            if best is None:
                reason = "" if within_budget else "node budget exhausted"
                raise UncertifiableError(suffix, reason=reason)
            chosen.setdefault(best[1], best[0])
            if not expandable:
                forced = max(forced, cost)
            continue
        expansions += 1
        for cand in roster:
            if cand in suffix:
                continue
            child = (cand,) + suffix
            child_best = _merge(best, search.best_new_option(child))
            child_cost = math.inf if child_best is None else child_best[0]
            heapq.heappush(heap, (-child_cost, child, child_best))

    ordered = sorted(chosen, key=lambda a: a.sort_key())
    scored = []
    n = tallies.total
    for a in ordered:
        m = margin_from_tallies(a, tallies)
        mean = Fraction(n + m, 2 * n)
        scored.append(ScoredAssertion(a, m, mean, chosen[a]))
    return AssertionSet(contest.contest_id, contest.reported_winner, scored)
