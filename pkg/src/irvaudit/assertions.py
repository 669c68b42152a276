"""Audit assertions and their encodings onto per-ballot values in {0, 1/2, 1}.

Two kinds are supported, both reducible to "the mean of the encoded values
exceeds 1/2":

  NEB  `winner` cannot be eliminated before `loser`: winner's first
       preferences must exceed loser's mentions not preceded by winner.
  NEN  with every candidate in `context` already eliminated, `winner` beats
       `loser` on the continuing tally, so `winner` is not eliminated at
       that step.

Means and margins use exact rational arithmetic so boundary cases can never
be flipped by rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .ballots import VoteRecord
from .tabulation import ProfileTallies

NEB = "NEB"
NEN = "NEN"


@dataclass(frozen=True)
class Assertion:
    kind: str
    winner: int
    loser: int
    context: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.kind not in (NEB, NEN):
            raise ValueError(f"unknown assertion kind {self.kind!r}")
        if self.winner == self.loser:
            raise ValueError("winner and loser must differ")
        if self.kind == NEB and self.context:
            raise ValueError("NEB assertions take no context")
        if self.kind == NEN and (self.winner in self.context or self.loser in self.context):
            raise ValueError("NEN winner/loser cannot be in the eliminated context")

    def sort_key(self) -> tuple:
        return (0 if self.kind == NEB else 1, self.winner, self.loser, tuple(sorted(self.context)))

    def token(self) -> str:
        """Machine-readable one-line form used in assertion files."""
        if self.kind == NEB:
            return f"NEB,{self.loser},{self.winner}"
        ctx = ",".join(str(c) for c in sorted(self.context))
        return f"NEN,{self.winner},{self.loser},{{{ctx}}}"

    def explanation(self) -> str:
        if self.kind == NEB:
            return f"Candidate {self.winner} cannot be eliminated before {self.loser}."
        ctx = ", ".join(str(c) for c in sorted(self.context))
        return f"Candidate {self.winner} cannot be eliminated next when {{{ctx}}} are eliminated."


HALF = Fraction(1, 2)

# Every assorter maps a ballot into [0, u] with u = 1; the comparison-audit
# encoding in the audit engine relies on this bound.
ASSORTER_UPPER_BOUND = 1


def assorter_value(assertion: Assertion, record: VoteRecord) -> Fraction:
    """Score one ballot: 1 favors the assertion, 0 opposes it, 1/2 is neutral."""
    ranking = record.ranking
    if assertion.kind == NEB:
        if ranking and ranking[0] == assertion.winner:
            return Fraction(1)
        for cid in ranking:
            if cid == assertion.winner:
                return HALF  # winner outranks any later mention of loser
            if cid == assertion.loser:
                return Fraction(0)
        return HALF
    # NEN: credit the ballot to its highest-ranked continuing candidate.
    context = assertion.context
    for cid in ranking:
        if cid in context:
            continue
        if cid == assertion.winner:
            return Fraction(1)
        if cid == assertion.loser:
            return Fraction(0)
        return HALF  # some other continuing candidate holds this ballot
    return HALF  # exhausted among the continuing set


def assorter_mean(assertion: Assertion, records: Sequence[VoteRecord]) -> Fraction:
    if not records:
        raise ValueError("assorter mean over empty record list")
    total = sum(assorter_value(assertion, rec) for rec in records)
    return Fraction(total, len(records))


def assertion_holds(assertion: Assertion, records: Sequence[VoteRecord]) -> bool:
    return assorter_mean(assertion, records) > HALF


def margin(assertion: Assertion, records: Sequence[VoteRecord]) -> int:
    """Sum of (2 * value - 1) over records: the surplus of favorable over
    opposing ballots. Positive exactly when the assertion holds."""
    total = sum(2 * assorter_value(assertion, rec) - 1 for rec in records)
    assert total.denominator == 1
    return int(total)


def margin_from_tallies(assertion: Assertion, tallies: ProfileTallies) -> int:
    """Same value as `margin`, computed from collapsed ranking counts."""
    if assertion.kind == NEB:
        return (tallies.first_preferences(assertion.winner)
                - tallies.mentions_without_earlier(assertion.loser, assertion.winner))
    # Neutral ballots cancel in the margin, so only winner/loser credits matter.
    won, lost = _nen_counts(assertion, tallies)
    return won - lost


def _nen_counts(assertion: Assertion, tallies: ProfileTallies) -> tuple[int, int]:
    won = lost = 0
    context = assertion.context
    for ranking, count in tallies.type_counts.items():
        for cid in ranking:
            if cid in context:
                continue
            if cid == assertion.winner:
                won += count
            elif cid == assertion.loser:
                lost += count
            break
    return won, lost


@dataclass
class ScoredAssertion:
    assertion: Assertion
    margin: int
    mean: Fraction
    difficulty: float


@dataclass
class AssertionSet:
    """The auditable certificate: assertions that jointly pin the winner."""

    contest_id: str
    reported_winner: int
    assertions: list[ScoredAssertion] = field(default_factory=list)

    def plain(self) -> list[Assertion]:
        return [sa.assertion for sa in self.assertions]

    def __len__(self) -> int:
        return len(self.assertions)


def score_assertions(assertions: Iterable[Assertion], records: Sequence[VoteRecord],
                     difficulty_fn=None) -> list[ScoredAssertion]:
    n = len(records)
    out = []
    for a in assertions:
        m = margin(a, records)
        mean = Fraction(n + m, 2 * n)
        d = float("inf") if difficulty_fn is None else difficulty_fn(m, n)
        out.append(ScoredAssertion(a, m, mean, d))
    return out


def _parse_assertion_token(line: str, line_no: int) -> Assertion:
    from .ballots import ParseError  # local import keeps module deps one-way

    fields = line.split(",")
    if fields[0] == NEB:
        if len(fields) != 3:
            raise ParseError("expected `NEB,<loser>,<winner>`", line_no)
        return Assertion(NEB, winner=int(fields[2]), loser=int(fields[1]))
    if fields[0] == NEN:
        if len(fields) < 4:
            raise ParseError("expected `NEN,<winner>,<loser>,{<context>}`", line_no)
        ctx_text = ",".join(fields[3:])
        if not (ctx_text.startswith("{") and ctx_text.endswith("}")):
            raise ParseError("NEN context must be brace-delimited", line_no)
        inner = ctx_text[1:-1].strip()
        context = frozenset(int(tok) for tok in inner.split(",") if tok.strip() != "")
        return Assertion(NEN, winner=int(fields[1]), loser=int(fields[2]), context=context)
    raise ParseError(f"unknown assertion kind {fields[0]!r}", line_no)


def write_assertion_text(aset: AssertionSet) -> str:
    lines = [f"CONTEST,{aset.contest_id},{aset.reported_winner}"]
    for sa in aset.assertions:
        lines.append(sa.assertion.token())
        lines.append(f"MARGIN,{sa.margin}")
        lines.append(f"MEAN,{sa.mean.numerator}/{sa.mean.denominator}")
        if sa.difficulty != float("inf"):
            lines.append(f"DIFFICULTY,{sa.difficulty:g}")
    return "\n".join(lines) + "\n"


def parse_assertion_text(text: str) -> AssertionSet:
    from .ballots import ParseError

    lines = [ln for ln in text.split("\n") if ln]
    if not lines or not lines[0].startswith("CONTEST,"):
        raise ParseError("assertion file must start with `CONTEST,<id>,<winner>`", 1)
    head = lines[0].split(",")
    if len(head) != 3:
        raise ParseError("expected `CONTEST,<id>,<winner>`", 1)
    aset = AssertionSet(contest_id=head[1], reported_winner=int(head[2]))
    current: ScoredAssertion | None = None
    for line_no, line in enumerate(lines[1:], start=2):
        key = line.split(",", 1)[0]
        if key in (NEB, NEN):
            current = ScoredAssertion(_parse_assertion_token(line, line_no), 0,
                                      Fraction(0), float("inf"))
            aset.assertions.append(current)
        elif key in ("MARGIN", "MEAN", "DIFFICULTY"):
            if current is None:
                raise ParseError(f"{key} line before any assertion", line_no)
            value = line.split(",", 1)[1]
            if key == "MARGIN":
                current.margin = int(value)
            elif key == "MEAN":
                num, den = value.split("/")
                current.mean = Fraction(int(num), int(den))
            else:
                current.difficulty = float(value)
        else:
            raise ParseError(f"unexpected line {line!r}", line_no)
    if not aset.assertions:
        raise ParseError("assertion file lists no assertions")
    return aset


def explanation_report(aset: AssertionSet) -> str:
    """Numbered plain-language listing, one line per assertion."""
    by_kind: dict[str, list[tuple[int, ScoredAssertion]]] = {NEB: [], NEN: []}
    for idx, sa in enumerate(aset.assertions):
        by_kind[sa.assertion.kind].append((idx, sa))
    lines = []
    if by_kind[NEB]:
        lines.append("Not-Eliminated-Before assertions:")
        for idx, sa in by_kind[NEB]:
            lines.append(f"  [{idx}] {sa.assertion.explanation()} (margin {sa.margin})")
    if by_kind[NEN]:
        lines.append("Elimination-step assertions:")
        for idx, sa in by_kind[NEN]:
            lines.append(f"  [{idx}] {sa.assertion.explanation()} (margin {sa.margin})")
    return "\n".join(lines) + "\n"
