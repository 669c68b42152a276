"""Contest/ballot data model and readers/writers for the interchange file formats.

Candidate ids are small non-negative integers so later stages can use dense
set encodings. A ranking is a preference list, highest preference first; an
empty ranking is a legal (blank or exhausted) card.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class ParseError(ValueError):
    """Syntactically malformed input; message names the offending line."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(ValueError):
    """Well-formed input that violates a contest-level constraint."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class VoteRecord:
    """One ballot card's ranking for one contest (used for both CVRs and MVRs)."""

    ballot_id: str
    ranking: tuple[int, ...]


@dataclass
class Contest:
    contest_id: str
    roster: frozenset[int]
    reported_winner: int | None
    card_upper_bound: int
    names: dict[int, str] = field(default_factory=dict)

    def candidates(self) -> list[int]:
        return sorted(self.roster)

    def label(self, candidate: int) -> str:
        name = self.names.get(candidate)
        return f"{candidate} ({name})" if name else str(candidate)


@dataclass
class BallotManifest:
    """Inventory of ballot containers; defines the sampling frame."""

    entries: list[tuple[str, int]]

    @property
    def total_cards(self) -> int:
        return sum(count for _, count in self.entries)

    def locate(self, position: int) -> tuple[str, int]:
        """Map a 0-based frame position to (container_label, 1-based offset)."""
        if position < 0:
            raise ValueError("position must be non-negative")
        remaining = position
        for label, count in self.entries:
            if remaining < count:
                return label, remaining + 1
            remaining -= count
        raise ValueError(f"position {position} beyond manifest total {self.total_cards}")


def normalize_ranking(raw: Sequence[int]) -> tuple[int, ...]:
    """Keep the first occurrence of each candidate, dropping later duplicates.

    Preserves relative order and is idempotent.
    """
    seen: set[int] = set()
    out: list[int] = []
    for c in raw:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(out)


def _parse_int(token: str, what: str, line_no: int) -> int:
    token = token.strip()
    if not token or not (token.isdigit() or (token[0] == "-" and token[1:].isdigit())):
        raise ParseError(f"expected integer {what}, got {token!r}", line_no)
    return int(token)


def _parse_candidate_field(token: str, line_no: int) -> tuple[int, str | None]:
    if ":" in token:
        id_part, name = token.split(":", 1)
    else:
        id_part, name = token, None
    cid = _parse_int(id_part, "candidate id", line_no)
    if cid < 0:
        raise ParseError(f"candidate id must be non-negative, got {cid}", line_no)
    return cid, name


def _parse_canonical(lines: list[str]) -> tuple[Contest, list[VoteRecord]]:
    if len(lines) < 3:
        raise ParseError("canonical file needs CONTEST, CANDIDATES and CARDS header lines")

    head = lines[0].split(",")
    if len(head) != 4 or head[0] != "CONTEST":
        raise ParseError("expected `CONTEST,<id>,<n_candidates>,<winner or ->`", 1)
    contest_id = head[1]
    n_candidates = _parse_int(head[2], "candidate count", 1)
    winner_token = head[3].strip()

    cand_fields = lines[1].split(",")
    if cand_fields[0] != "CANDIDATES":
        raise ParseError("expected `CANDIDATES,<id>[:<name>],...`", 2)
    names: dict[int, str] = {}
    roster_list: list[int] = []
    for token in cand_fields[1:]:
        cid, name = _parse_candidate_field(token, 2)
        if cid in roster_list:
            raise ValidationError(f"duplicate candidate id {cid}", 2)
        roster_list.append(cid)
        if name:
            names[cid] = name
    if len(roster_list) != n_candidates:
        raise ValidationError(
            f"CONTEST declares {n_candidates} candidates but CANDIDATES lists {len(roster_list)}", 2
        )
    roster = frozenset(roster_list)

    cards_fields = lines[2].split(",")
    if len(cards_fields) != 2 or cards_fields[0] != "CARDS":
        raise ParseError("expected `CARDS,<card_upper_bound>`", 3)
    card_upper_bound = _parse_int(cards_fields[1], "card upper bound", 3)
    if card_upper_bound <= 0:
        raise ValidationError("card upper bound must be positive", 3)

    if winner_token == "-":
        reported_winner: int | None = None
    else:
        reported_winner = _parse_int(winner_token, "winner id", 1)
        if reported_winner not in roster:
            raise ValidationError(f"reported winner {reported_winner} not in roster", 1)

    records: list[VoteRecord] = []
    seen_ids: set[str] = set()
    for offset, line in enumerate(lines[3:]):
        line_no = offset + 4
        fields = line.split(",")
        ballot_id = fields[0]
        if not ballot_id:
            raise ParseError("empty ballot id", line_no)
        if ballot_id in seen_ids:
            raise ValidationError(f"duplicate ballot id {ballot_id!r}", line_no)
        seen_ids.add(ballot_id)
        ranking: list[int] = []
        for token in fields[1:]:
            cid = _parse_int(token, "rank entry", line_no)
            if cid not in roster:
                raise ValidationError(f"candidate {cid} not in roster", line_no)
            ranking.append(cid)
        records.append(VoteRecord(ballot_id, normalize_ranking(ranking)))

    contest = Contest(contest_id, roster, reported_winner, card_upper_bound, names)
    if card_upper_bound < len(records):
        raise ValidationError(
            f"card upper bound {card_upper_bound} below ballot count {len(records)}"
        )
    return contest, records


def _parse_raire_legacy(lines: list[str]) -> tuple[Contest, list[VoteRecord]]:
    """Legacy research interchange format: a contest-count line, one
    `Contest,<id>,<n>,<cand>,...` line per contest, then `<contest>,<ballot>,<rank>,...`
    ballot lines. Only single-contest files are accepted here; split multi-contest
    exports before converting."""
    if not lines:
        raise ParseError("empty file")
    n_contests = _parse_int(lines[0], "contest count", 1)
    if n_contests != 1:
        raise ValidationError(
            f"legacy file declares {n_contests} contests; convert one contest at a time", 1
        )
    if len(lines) < 2:
        raise ParseError("missing Contest header line", 2)
    head = lines[1].split(",")
    if len(head) < 4 or head[0].lower() != "contest":
        raise ParseError("expected `Contest,<id>,<n_candidates>,<cand>,...`", 2)
    contest_id = head[1]
    n_candidates = _parse_int(head[2], "candidate count", 2)
    roster_list = [_parse_int(tok, "candidate id", 2) for tok in head[3:]]
    if len(roster_list) != n_candidates:
        raise ValidationError(
            f"header declares {n_candidates} candidates but lists {len(roster_list)}", 2
        )
    if len(set(roster_list)) != len(roster_list):
        raise ValidationError("duplicate candidate id in header", 2)
    roster = frozenset(roster_list)

    records: list[VoteRecord] = []
    seen_ids: set[str] = set()
    for offset, line in enumerate(lines[2:]):
        line_no = offset + 3
        fields = line.split(",")
        if len(fields) < 2:
            raise ParseError("expected `<contest_id>,<ballot_id>,<rank>,...`", line_no)
        if fields[0] != contest_id:
            raise ValidationError(f"ballot for unknown contest {fields[0]!r}", line_no)
        ballot_id = fields[1]
        if not ballot_id:
            raise ParseError("empty ballot id", line_no)
        if ballot_id in seen_ids:
            raise ValidationError(f"duplicate ballot id {ballot_id!r}", line_no)
        seen_ids.add(ballot_id)
        ranking: list[int] = []
        for token in fields[2:]:
            if token == "":
                continue  # legacy writers pad skipped ranks with empty fields
            cid = _parse_int(token, "rank entry", line_no)
            if cid not in roster:
                raise ValidationError(f"candidate {cid} not in roster", line_no)
            ranking.append(cid)
        records.append(VoteRecord(ballot_id, normalize_ranking(ranking)))

    contest = Contest(contest_id, roster, None, max(len(records), 1), {})
    return contest, records


def parse_cvr_text(text: str, format: str = "canonical") -> tuple[Contest, list[VoteRecord]]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if format == "canonical":
        return _parse_canonical(lines)
    if format == "raire-legacy":
        return _parse_raire_legacy(lines)
    raise ValueError(f"unknown CVR format {format!r}")


def parse_cvr_file(path: str | os.PathLike, format: str = "canonical") -> tuple[Contest, list[VoteRecord]]:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return parse_cvr_text(text.replace("\r\n", "\n"), format=format)


def _check_plain_token(token: str, what: str) -> None:
    if "," in token or "\n" in token or "\r" in token:
        raise ValidationError(f"{what} {token!r} may not contain commas or newlines")


def write_canonical_text(contest: Contest, records: Iterable[VoteRecord]) -> str:
    _check_plain_token(contest.contest_id, "contest id")
    roster = contest.candidates()
    winner = "-" if contest.reported_winner is None else str(contest.reported_winner)
    lines = [f"CONTEST,{contest.contest_id},{len(roster)},{winner}"]
    cand_tokens = []
    for cid in roster:
        name = contest.names.get(cid)
        if name:
            _check_plain_token(name, "candidate name")
            if ":" in name:
                raise ValidationError(f"candidate name {name!r} may not contain ':'")
            cand_tokens.append(f"{cid}:{name}")
        else:
            cand_tokens.append(str(cid))
    lines.append("CANDIDATES," + ",".join(cand_tokens))
    lines.append(f"CARDS,{contest.card_upper_bound}")
    for rec in records:
        _check_plain_token(rec.ballot_id, "ballot id")
        for cid in rec.ranking:
            if cid not in contest.roster:
                raise ValidationError(
                    f"ballot {rec.ballot_id!r} ranks candidate {cid} outside the roster"
                )
        lines.append(",".join([rec.ballot_id] + [str(c) for c in rec.ranking]))
    return "\n".join(lines) + "\n"


def write_canonical(contest: Contest, records: Iterable[VoteRecord], path: str | os.PathLike) -> None:
    text = write_canonical_text(contest, records)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write canonical CVR file {os.fspath(path)!r}: {exc}") from exc


def parse_manifest_text(text: str) -> BallotManifest:
    entries: list[tuple[str, int]] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise ParseError("expected `<container_label>,<card_count>`", line_no)
        label = fields[0]
        count = _parse_int(fields[1], "card count", line_no)
        if count <= 0:
            raise ValidationError("card count must be positive", line_no)
        entries.append((label, count))
    return BallotManifest(entries)


def parse_manifest_file(path: str | os.PathLike) -> BallotManifest:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_manifest_text(fh.read().replace("\r\n", "\n"))


def write_manifest_text(manifest: BallotManifest) -> str:
    for label, _ in manifest.entries:
        _check_plain_token(label, "container label")
    return "".join(f"{label},{count}\n" for label, count in manifest.entries)
