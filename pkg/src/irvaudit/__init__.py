"""Risk-limiting audit toolkit for instant-runoff (ranked choice) contests."""

from .assertions import (NEB, NEN, Assertion, AssertionSet, ScoredAssertion,
                         assertion_holds, assorter_mean, assorter_value, margin,
                         parse_assertion_text, write_assertion_text)
from .audit import (Audit, AuditError, AuditSpec, AuditState, DrawnBallot, MvrRecord,
                    comparison_value, make_mvr, polling_value)
from .ballots import (BallotManifest, Contest, ParseError, ValidationError, VoteRecord,
                      normalize_ranking, parse_cvr_file, parse_cvr_text,
                      parse_manifest_file, write_canonical)
from .generation import (OutcomeMismatchError, UncertifiableError, generate_assertions,
                         score_difficulty)
from .risk import estimate_sample_size, martingale_pvalues, risk_pvalue
from .sampling import position_for_draw, sample_positions
from .tabulation import (EliminationResult, TieError, continuing_tally, first_pref_count,
                         max_mentions_excluding, tabulate)
from .verification import (PrunedTree, VerificationResult, contradicts, export_dot,
                           export_treedoc, parse_treedoc, verify_assertion_set)

__version__ = "0.1.0"
