"""Synthetic 4-candidate contest shaped like a close vote-by-mail IRV race.

Candidates 15..18; elimination order 16, 17, 15 with 18 winning the final
round by a thin margin (4 units in 190). `scale=1000` gives the full
~190k-ballot version; `scale=1` a proportionally identical 190-ballot one.
"""
from __future__ import annotations

from irvaudit.ballots import Contest, VoteRecord

# ranking -> count per scale unit
REPLICA_SHAPE: dict[tuple[int, ...], int] = {
    (18,): 40,
    (18, 15): 20,
    (18, 17, 15): 10,
    (15,): 30,
    (15, 18): 16,
    (15, 17, 18): 16,
    (17, 15): 12,
    (17, 18): 15,
    (17,): 6,
    (16, 17, 15): 8,
    (16, 17, 18): 7,
    (16, 15): 6,
    (16,): 4,
}

NAMES = {15: "Ash", 16: "Birch", 17: "Cedar", 18: "Davin"}


def replica_records(scale: int = 1) -> tuple[Contest, list[VoteRecord]]:
    records = []
    i = 0
    for ranking, base in REPLICA_SHAPE.items():
        for _ in range(base * scale):
            records.append(VoteRecord(f"vbm-{i:06d}", ranking))
            i += 1
    contest = Contest("da-replica", frozenset({15, 16, 17, 18}), 18, len(records), dict(NAMES))
    return contest, records
