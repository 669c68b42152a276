"""Instant-runoff tabulation and the projected tallies assertions are built from.

Each round credits every ballot to its highest-ranked standing candidate and
eliminates the standing candidate with the smallest tally. All functions are
pure; `tabulate` is deterministic for a fixed tie policy.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ballots import Contest, VoteRecord

TIE_POLICIES = ("lowest-id", "error")


class TieError(ValueError):
    """Raised under the `error` tie policy when a round's minimum is shared."""

    def __init__(self, round_index: int, tied: Sequence[int]):
        super().__init__(f"round {round_index}: tied minimum among {sorted(tied)}")
        self.round_index = round_index
        self.tied = tuple(sorted(tied))


@dataclass(frozen=True)
class EliminationResult:
    order: tuple[int, ...]
    winner: int
    round_tallies: tuple[dict[int, int], ...]
    tie_rounds: tuple[int, ...]


class ProfileTallies:
    """Counted view of a ballot profile, collapsing identical rankings.

    Distinct rankings over a small roster are few, so per-(standing set)
    tallies cost O(#types) after the initial pass instead of O(#records).
    """

    def __init__(self, records: Iterable[VoteRecord | Sequence[int]]):
        type_counts: Counter[tuple[int, ...]] = Counter()
        for rec in records:
            ranking = rec.ranking if isinstance(rec, VoteRecord) else tuple(rec)
            type_counts[ranking] += 1
        self.type_counts = type_counts
        self.total = sum(type_counts.values())
        self._standing_cache: dict[frozenset[int], dict[int, int]] = {}

    def continuing(self, standing: frozenset[int]) -> dict[int, int]:
        cached = self._standing_cache.get(standing)
        if cached is not None:
            return cached
        tally = {c: 0 for c in standing}
        for ranking, count in self.type_counts.items():
            for cid in ranking:
                if cid in standing:
                    tally[cid] += count
                    break
        self._standing_cache[standing] = tally
        return tally

    def first_preferences(self, candidate: int) -> int:
        return sum(count for ranking, count in self.type_counts.items()
                   if ranking and ranking[0] == candidate)

    def mentions_without_earlier(self, mentioned: int, blocker: int) -> int:
        """Ballots ranking `mentioned` with no strictly earlier rank for `blocker`."""
        total = 0
        for ranking, count in self.type_counts.items():
            for cid in ranking:
                if cid == blocker:
                    break
                if cid == mentioned:
                    total += count
                    break
        return total


def continuing_tally(records: Iterable[VoteRecord], standing: Iterable[int]) -> dict[int, int]:
    """Credit each record to its highest-ranked standing candidate.

    Records ranking no standing candidate are credited to no one.
    """
    standing_set = frozenset(standing)
    if not standing_set:
        raise ValueError("standing set must be nonempty")
    return ProfileTallies(records).continuing(standing_set)


def first_pref_count(records: Iterable[VoteRecord], candidate: int) -> int:
    return ProfileTallies(records).first_preferences(candidate)


def max_mentions_excluding(records: Iterable[VoteRecord], mentioned: int, blocker: int) -> int:
    """Count records mentioning `mentioned` at any rank with no strictly higher
    preference for `blocker`. This is `mentioned`'s highest achievable tally
    while `blocker` is standing, since tallies only accrue as others drop out."""
    if mentioned == blocker:
        raise ValueError("candidates must differ")
    return ProfileTallies(records).mentions_without_earlier(mentioned, blocker)


def _eliminate_one(tally: Mapping[int, int], round_index: int, tie_policy: str) -> tuple[int, bool]:
    low = min(tally.values())
    tied = [c for c, t in tally.items() if t == low]
    if len(tied) == 1:
        return tied[0], False
    if tie_policy == "error":
        raise TieError(round_index, tied)
    if tie_policy != "lowest-id":
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    return min(tied), True


def tabulate(contest: Contest, records: Iterable[VoteRecord],
             tie_policy: str = "lowest-id") -> EliminationResult:
    if not contest.roster:
        raise ValueError("contest roster is empty")
    tallies = ProfileTallies(records)
    standing = frozenset(contest.roster)
    order: list[int] = []
    rounds: list[dict[int, int]] = []
    tie_rounds: list[int] = []
    round_index = 0
    while len(standing) > 1:
        tally = tallies.continuing(standing)
        rounds.append(dict(sorted(tally.items())))
        out, tied = _eliminate_one(tally, round_index, tie_policy)
        if tied:
            tie_rounds.append(round_index)
        order.append(out)
        standing = standing - {out}
        round_index += 1
    (winner,) = standing
    return EliminationResult(tuple(order), winner, tuple(rounds), tuple(tie_rounds))


def format_rounds(contest: Contest, result: EliminationResult) -> str:
    """Human-readable per-round summary for CLI output."""
    lines = []
    for i, tally in enumerate(result.round_tallies):
        parts = ", ".join(f"{contest.label(c)}: {t}" for c, t in sorted(tally.items()))
        lines.append(f"round {i + 1}: {parts}")
        lines.append(f"  eliminated: {contest.label(result.order[i])}"
                     + ("  (tie broken by lowest id)" if i in result.tie_rounds else ""))
    lines.append(f"winner: {contest.label(result.winner)}")
    return "\n".join(lines)
