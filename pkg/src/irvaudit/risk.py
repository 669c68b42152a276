"""Sequential risk measurement for audit value streams.

The test statistic is the running product M_j = prod_{i<=j} (x_i / (1/2)),
a nonnegative supermartingale with unit start whenever the population mean
is at most 1/2 and draws are with replacement. The reported p-value is
1 / max_j M_j, capped at 1, so it never increases as the stream extends.
A stream value of 0 drives the product to 0 permanently; the best prefix
still counts, which is what lets a clean prefix confirm before a
worst-case ballot lands.

Exact rational arithmetic is used up to `exact_limit` stream values; past
that the product continues in log space with rounding directed so the
reported p can only be larger (conservative).
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

HALF = Fraction(1, 2)
EXACT_LIMIT = 4096

NOT_ATTAINABLE = math.inf


def martingale_pvalues(values: Iterable[Fraction], u_max: Fraction | int = 1,
                       exact_limit: int = EXACT_LIMIT) -> list[Fraction]:
    """p-value after each prefix of the stream.

    Parameters
    ----------
    values: stream of nonnegative values, each at most u_max
    u_max: upper bound the caller promises for the stream
    exact_limit: prefix length computed in exact rationals

    Returns
    -------
    list of Fractions, entry j the p-value after j+1 draws; non-increasing.
    """
    u_bound = Fraction(u_max)
    product = Fraction(1)
    best = Fraction(1)
    log_product: float | None = None
    log_best: float | None = None
    history: list[Fraction] = []
    absorbed = False
    for i, raw in enumerate(values):
        x = Fraction(raw)
        if x < 0:
            raise ValueError(f"stream value {x} is negative")
        if x > u_bound:
            raise ValueError(f"stream value {x} exceeds bound {u_bound}")
        if not absorbed:
            if x == 0:
                absorbed = True
            elif log_product is None and i < exact_limit:
                product *= 2 * x
                if product > best:
                    best = product
            else:
                if log_product is None:
                    # switch domains; round the carried log down so p rounds up
                    log_product = _log_down(product)
                    log_best = _log_down(best)
                log_product = math.nextafter(log_product + _log_down(2 * x), -math.inf)
                if log_best is None or log_product > log_best:
                    log_best = log_product
        if log_best is not None:
            p_float = math.nextafter(math.exp(-log_best), math.inf)
            history.append(min(Fraction(1), Fraction(p_float)))
        else:
            history.append(min(Fraction(1), 1 / best))
    return history


def _log_down(value: Fraction) -> float:
    approx = math.log(value.numerator) - math.log(value.denominator)
    return math.nextafter(math.nextafter(approx, -math.inf), -math.inf)


def risk_pvalue(values: Sequence[Fraction], u_max: Fraction | int = 1,
                exact_limit: int = EXACT_LIMIT) -> Fraction:
    """Current p-value for the whole stream (1 for an empty stream)."""
    history = martingale_pvalues(values, u_max=u_max, exact_limit=exact_limit)
    return history[-1] if history else Fraction(1)


def comparison_clean_value(margin: int, n_records: int) -> Fraction:
    """Per-draw comparison value when the manual reading matches the record,
    1 / (2 - v) for diluted margin v = margin / n_records."""
    return Fraction(n_records, 2 * n_records - margin)


def polling_clean_value(margin: int, n_records: int) -> Fraction:
    """Reported assorter mean, the expected per-draw value for a polling audit."""
    return Fraction(n_records + margin, 2 * n_records)


def closed_form_sample_size(per_draw: Fraction, alpha: Fraction) -> int | float:
    """Smallest n with (2 * per_draw)^n >= 1/alpha, for a constant stream.

    Returns NOT_ATTAINABLE when per_draw <= 1/2 (the product never grows).
    """
    per_draw = Fraction(per_draw)
    alpha = Fraction(alpha)
    if per_draw <= HALF:
        return NOT_ATTAINABLE
    ratio = 2 * per_draw
    target = 1 / alpha
    n = max(1, math.ceil(math.log(float(target)) / math.log(float(ratio))))
    # float estimate, then exact adjustment around it
    while ratio ** n < target:
        n += 1
    while n > 1 and ratio ** (n - 1) >= target:
        n -= 1
    return n


def error_positions(rate: float, n: int) -> list[int]:
    """1-based positions of errors interleaved uniformly at `rate` over n draws."""
    if rate <= 0:
        return []
    out = []
    prev = 0
    for i in range(1, n + 1):
        cur = math.floor(i * rate)
        if cur > prev:
            out.append(i)
        prev = cur
    return out


def simulated_sample_size(clean_value: Fraction, error_value: Fraction,
                          error_rate: float, alpha: Fraction,
                          max_draws: int = 100_000) -> int | float:
    """Smallest n at which the deterministic planning stream reaches p <= alpha.

    The stream repeats `clean_value`, replacing positions at `error_rate`
    (spread uniformly) with `error_value`. Float log arithmetic: this is a
    planning estimate, not a risk measurement.
    """
    alpha_f = float(alpha)
    if error_rate >= 1:
        clean_value = error_value  # every draw is an error
        error_rate = 0.0
    target = math.log(1 / alpha_f)
    log_clean = math.log(float(2 * clean_value)) if clean_value > 0 else -math.inf
    log_err = math.log(float(2 * error_value)) if error_value > 0 else -math.inf
    if error_rate <= 0 and log_clean <= 0:
        return NOT_ATTAINABLE
    log_m = 0.0
    best = 0.0
    prev_floor = 0
    for i in range(1, max_draws + 1):
        cur_floor = math.floor(i * error_rate) if error_rate > 0 else 0
        is_error = cur_floor > prev_floor
        prev_floor = cur_floor
        step = log_err if is_error else log_clean
        if step == -math.inf:
            log_m = -math.inf
        elif log_m != -math.inf:
            log_m += step
        best = max(best, log_m)
        if best >= target:
            return i
    return NOT_ATTAINABLE


def estimate_sample_size(clean_value: Fraction, error_value: Fraction,
                         error_rate: float, alpha: Fraction,
                         max_draws: int = 100_000) -> int | float:
    """Planning estimate of the draws needed to confirm one assertion.

    Zero error rate uses the exact closed form for the constant stream;
    otherwise the deterministic error-interleaved stream is simulated.
    """
    if error_rate <= 0:
        return closed_form_sample_size(clean_value, alpha)
    return simulated_sample_size(clean_value, error_value, error_rate, alpha,
                                 max_draws=max_draws)


def draws_to_target(current_product: Fraction, clean_value: Fraction,
                    alpha: Fraction) -> int | float:
    """Additional clean draws needed for the running product to reach 1/alpha."""
    if current_product <= 0:
        return NOT_ATTAINABLE
    if current_product >= 1 / Fraction(alpha):
        return 0
    if clean_value <= HALF:
        return NOT_ATTAINABLE
    gap = math.log(float(1 / Fraction(alpha))) - _log_float(current_product)
    step = math.log(float(2 * clean_value))
    return max(0, math.ceil(gap / step))


def _log_float(value: Fraction) -> float:
    return math.log(value.numerator) - math.log(value.denominator)
