"""Sequential ballot-level audit: seeded draws, manual-record entry, and
per-assertion risk measurement.

Draw order is canonical: stream values are consumed in draw order even when
manual records arrive out of order, so a replay of the same spec and entry
log always reproduces every p-value exactly. Positions in the sampling
frame beyond the record list are phantoms; phantoms and unretrievable cards
take worst-case values so missing paper can only hurt confirmation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import risk
from .assertions import Assertion, AssertionSet, assorter_value, margin_from_tallies
from .ballots import Contest, VoteRecord, normalize_ranking
from .sampling import sample_positions
from .tabulation import ProfileTallies

MODES = ("comparison", "polling")

STATUS_IN_PROGRESS = "in_progress"
STATUS_CONFIRMED = "confirmed"
STATUS_ESCALATED = "escalate_full_hand_count"

PHANTOM_PREFIX = "phantom:"


class AuditError(ValueError):
    pass


@dataclass(frozen=True)
class MvrRecord:
    """A human auditor's reading of one paper card (or the failure to find it)."""

    ballot_id: str
    ranking: tuple[int, ...] | None
    not_found: bool = False
    double_entry_confirmed: bool = False


def make_mvr(ballot_id: str, ranking: Sequence[int] | None = None,
             not_found: bool = False, double_entry_confirmed: bool = False) -> MvrRecord:
    if not_found:
        return MvrRecord(ballot_id, None, True, double_entry_confirmed)
    if ranking is None:
        raise AuditError("an MVR needs a ranking unless flagged not_found")
    return MvrRecord(ballot_id, normalize_ranking(ranking), False, double_entry_confirmed)


@dataclass(frozen=True)
class DrawnBallot:
    draw_index: int  # 1-based position in the sample sequence
    position: int    # 0-based position in the sampling frame
    ballot_id: str
    phantom: bool


@dataclass
class AuditSpec:
    contest: Contest
    assertion_set: AssertionSet
    risk_limit: Fraction
    mode: str
    seed: str
    total_cards: int
    error_rate_guess: float = 0.0

    def __post_init__(self):
        self.risk_limit = Fraction(self.risk_limit)
        if not 0 < self.risk_limit < 1:
            raise AuditError(f"risk limit {self.risk_limit} outside (0, 1)")
        if self.mode not in MODES:
            raise AuditError(f"unknown audit mode {self.mode!r}")
        if not self.seed:
            raise AuditError("audit seed must be nonempty")
        if self.total_cards <= 0:
            raise AuditError("total card count must be positive")


@dataclass
class AssertionStatus:
    assertion: Assertion
    margin: int
    mean: Fraction
    p_value: Fraction
    p_history: list[Fraction]
    confirmed: bool
    estimated_additional: float


@dataclass
class AuditState:
    status: str
    draws: list[DrawnBallot]
    entries: dict[str, MvrRecord]
    filled_prefix: int
    assertions: list[AssertionStatus]
    discrepancies: list[str]  # ballot ids in the prefix whose reading mismatched

    @property
    def confirmed(self) -> bool:
        return self.status == STATUS_CONFIRMED


def comparison_value(assertion: Assertion, cvr: VoteRecord | None,
                     mvr: MvrRecord | None, v: Fraction) -> Fraction:
    """Overstatement-based comparison value B = (1 - w) / (2 - v).

    `v` is the diluted margin 2 * reported_mean - 1 and must be positive. A
    missing record (phantom position) counts as a full vote for the
    assertion on the reported side; a missing or unretrievable paper card
    counts as a full vote against. Both choices maximize the overstatement,
    so defects can only delay confirmation.
    """
    if v <= 0:
        raise AuditError("assertion not confirmable by comparison: "
                         "reported records already refute it")
    a_cvr = Fraction(1) if cvr is None else assorter_value(assertion, cvr)
    if mvr is None or mvr.not_found:
        a_mvr = Fraction(0)
    else:
        a_mvr = assorter_value(assertion, VoteRecord(mvr.ballot_id, mvr.ranking))
    overstatement = a_cvr - a_mvr
    return (1 - overstatement) / (2 - v)


def polling_value(assertion: Assertion, mvr: MvrRecord | None) -> Fraction:
    if mvr is None or mvr.not_found:
        return Fraction(0)
    return assorter_value(assertion, VoteRecord(mvr.ballot_id, mvr.ranking))


class Audit:
    """In-memory audit engine; persistence and transport live elsewhere.

    All mutation goes through draw()/enter()/escalate(); state() derives a
    consistent snapshot, recomputing every p-value from the entered prefix.
    """

    def __init__(self, spec: AuditSpec, cvrs: Sequence[VoteRecord]):
        if spec.total_cards < len(cvrs):
            raise AuditError(f"total cards {spec.total_cards} below record count {len(cvrs)}")
        if spec.contest.card_upper_bound < len(cvrs):
            raise AuditError("contest card upper bound below record count")
        self.spec = spec
        self.cvrs = list(cvrs)
        self.cvr_by_id: dict[str, VoteRecord] = {}
        for rec in self.cvrs:
            if rec.ballot_id in self.cvr_by_id:
                raise AuditError(f"duplicate ballot id {rec.ballot_id!r} in records")
            if rec.ballot_id.startswith(PHANTOM_PREFIX):
                raise AuditError(f"ballot id {rec.ballot_id!r} collides with phantom namespace")
            self.cvr_by_id[rec.ballot_id] = rec

        tallies = ProfileTallies(self.cvrs)
        n = max(tallies.total, 1)
        self.margins: list[int] = []
        self.v: list[Fraction] = []
        for sa in spec.assertion_set.assertions:
            m = margin_from_tallies(sa.assertion, tallies)
            self.margins.append(m)
            self.v.append(Fraction(m, n))
            if spec.mode == "comparison" and m <= 0:
                raise AuditError(
                    f"assertion `{sa.assertion.token()}` has non-positive margin {m}; "
                    "not confirmable by comparison"
                )
        self.n_records = tallies.total
        self.draws: list[DrawnBallot] = []
        self.entries: dict[str, MvrRecord] = {}
        self._escalated = False

    # -- sampling ---------------------------------------------------------

    def draw(self, count: int) -> list[DrawnBallot]:
        """Extend the sample by `count` draws (with replacement)."""
        if count < 0:
            raise AuditError("draw count must be non-negative")
        start = len(self.draws)
        positions = sample_positions(self.spec.seed, self.spec.total_cards, start, count)
        new = []
        for offset, pos in enumerate(positions):
            if pos < len(self.cvrs):
                ballot_id = self.cvrs[pos].ballot_id
                phantom = False
            else:
                ballot_id = f"{PHANTOM_PREFIX}{pos}"
                phantom = True
            new.append(DrawnBallot(start + offset + 1, pos, ballot_id, phantom))
        self.draws.extend(new)
        return new

    def pending_ballots(self) -> list[DrawnBallot]:
        seen: set[str] = set()
        out = []
        for d in self.draws:
            if d.ballot_id not in self.entries and d.ballot_id not in seen:
                seen.add(d.ballot_id)
                out.append(d)
        return out

    # -- entry ------------------------------------------------------------

    def enter(self, mvr: MvrRecord) -> None:
        drawn_ids = {d.ballot_id for d in self.draws}
        if mvr.ballot_id not in drawn_ids:
            raise AuditError(f"ballot {mvr.ballot_id!r} was not drawn")
        if mvr.ballot_id in self.entries:
            raise AuditError(f"ballot {mvr.ballot_id!r} already entered")
        if mvr.ranking is not None:
            for cid in mvr.ranking:
                if cid not in self.spec.contest.roster:
                    raise AuditError(f"MVR ranks unknown candidate {cid}")
        self.entries[mvr.ballot_id] = mvr

    def escalate(self) -> None:
        self._escalated = True

    def update(self, mvrs: Iterable[MvrRecord]) -> AuditState:
        for mvr in mvrs:
            self.enter(mvr)
        return self.state()

    # -- risk measurement ---------------------------------------------------

    def filled_prefix(self) -> int:
        """Longest prefix of the draw sequence with every MVR entered."""
        k = 0
        for d in self.draws:
            if d.ballot_id not in self.entries:
                break
            k += 1
        return k

    def stream_value(self, index: int, draw: DrawnBallot) -> Fraction:
        sa = self.spec.assertion_set.assertions[index]
        mvr = self.entries.get(draw.ballot_id)
        if self.spec.mode == "polling":
            return polling_value(sa.assertion, mvr)
        cvr = None if draw.phantom else self.cvr_by_id[draw.ballot_id]
        return comparison_value(sa.assertion, cvr, mvr, self.v[index])

    def _clean_value(self, index: int) -> Fraction:
        n = max(self.n_records, 1)
        if self.spec.mode == "comparison":
            return risk.comparison_clean_value(self.margins[index], n)
        return risk.polling_clean_value(self.margins[index], n)

    def _stream_bound(self, index: int) -> Fraction:
        if self.spec.mode == "polling":
            return Fraction(1)
        return 2 / (2 - self.v[index])

    def _ballot_mismatch(self, draw: DrawnBallot) -> bool:
        mvr = self.entries.get(draw.ballot_id)
        if draw.phantom or mvr is None or mvr.not_found:
            return True
        return mvr.ranking != self.cvr_by_id[draw.ballot_id].ranking

    def state(self) -> AuditState:
        prefix = self.filled_prefix()
        alpha = self.spec.risk_limit
        statuses: list[AssertionStatus] = []
        all_confirmed = bool(self.spec.assertion_set.assertions)
        for index, sa in enumerate(self.spec.assertion_set.assertions):
            values = [self.stream_value(index, self.draws[i]) for i in range(prefix)]
            history = risk.martingale_pvalues(values, u_max=self._stream_bound(index))
            p = history[-1] if history else Fraction(1)
            confirmed = p <= alpha
            product = Fraction(1)
            clean = self._clean_value(index)
            for value in values:
                product = product * 2 * value
            additional = risk.draws_to_target(product, clean, alpha) if not confirmed else 0
            statuses.append(AssertionStatus(
                assertion=sa.assertion, margin=self.margins[index],
                mean=Fraction(self.n_records + self.margins[index], 2 * max(self.n_records, 1)),
                p_value=p, p_history=history, confirmed=confirmed,
                estimated_additional=float(additional),
            ))
            all_confirmed = all_confirmed and confirmed
        discrepancies: list[str] = []
        seen: set[str] = set()
        for d in self.draws[:prefix]:
            if d.ballot_id not in seen and self._ballot_mismatch(d):
                seen.add(d.ballot_id)
                discrepancies.append(d.ballot_id)
        if self._escalated:
            status = STATUS_ESCALATED
        elif all_confirmed:
            status = STATUS_CONFIRMED
        else:
            status = STATUS_IN_PROGRESS
        return AuditState(status=status, draws=list(self.draws), entries=dict(self.entries),
                          filled_prefix=prefix, assertions=statuses,
                          discrepancies=discrepancies)

    # -- planning -----------------------------------------------------------

    def assertion_sample_estimate(self, index: int, error_rate: float | None = None) -> float:
        rate = self.spec.error_rate_guess if error_rate is None else error_rate
        clean = self._clean_value(index)
        if self.spec.mode == "comparison":
            error_value = clean / 2  # reading that loses one assorter half-unit
        else:
            error_value = Fraction(0)
        return float(risk.estimate_sample_size(clean, error_value, rate, self.spec.risk_limit))

    def initial_sample_size(self) -> int:
        """Planning size for the first draw: the worst assertion's estimate."""
        estimates = [self.assertion_sample_estimate(i)
                     for i in range(len(self.spec.assertion_set.assertions))]
        finite = [e for e in estimates if e != risk.NOT_ATTAINABLE]
        if len(finite) < len(estimates):
            # retry the divergent ones assuming no errors at all
            finite = []
            for i in range(len(estimates)):
                e = self.assertion_sample_estimate(i, error_rate=0.0)
                if e == risk.NOT_ATTAINABLE:
                    raise AuditError(
                        "no finite sample-size estimate; pass an explicit draw size"
                    )
                finite.append(e)
        return int(max(finite)) if finite else 0

    def suggested_next_draw(self) -> float:
        state = self.state()
        open_estimates = [a.estimated_additional for a in state.assertions if not a.confirmed]
        if not open_estimates:
            return 0
        return max(open_estimates)
