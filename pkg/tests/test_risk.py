import math
import random
from fractions import Fraction

import pytest

from irvaudit.risk import (NOT_ATTAINABLE, closed_form_sample_size,
                           comparison_clean_value, draws_to_target, error_positions,
                           estimate_sample_size, martingale_pvalues, polling_clean_value,
                           risk_pvalue, simulated_sample_size)

from oracles import closed_form_draws, exact_pvalue

ONE = Fraction(1)
HALF = Fraction(1, 2)


def test_all_ones_stream():
    history = martingale_pvalues([ONE] * 5)
    assert history == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8),
                       Fraction(1, 16), Fraction(1, 32)]
    assert risk_pvalue([ONE] * 5) == Fraction(1, 32)
    assert float(risk_pvalue([ONE] * 5)) <= 0.05


def test_zero_is_absorbing_but_best_prefix_stands():
    values = [ONE, ONE, Fraction(0), ONE, ONE]
    history = martingale_pvalues(values)
    assert history == [HALF, Fraction(1, 4), Fraction(1, 4), Fraction(1, 4), Fraction(1, 4)]


def test_all_halves_is_uninformative():
    assert risk_pvalue([HALF] * 50) == 1


def test_empty_stream():
    assert risk_pvalue([]) == 1


def test_negative_value_rejected():
    with pytest.raises(ValueError):
        risk_pvalue([Fraction(-1, 2)])


def test_bound_violation_rejected():
    with pytest.raises(ValueError):
        risk_pvalue([Fraction(3, 2)], u_max=1)
    # fine with an explicit comparison bound
    assert risk_pvalue([Fraction(3, 2)], u_max=2) == Fraction(1, 3)


def test_matches_bruteforce_oracle_on_random_streams():
    rng = random.Random(55)
    choices = [Fraction(0), HALF, ONE, Fraction(3, 4), Fraction(2, 3)]
    for _ in range(300):
        values = [rng.choice(choices) for _ in range(rng.randint(0, 40))]
        got = martingale_pvalues(values)
        assert all(0 < p <= 1 for p in got)
        # non-increasing
        assert all(got[i + 1] <= got[i] for i in range(len(got) - 1))
        if values:
            assert got[-1] == min(ONE, exact_pvalue(values))


def test_log_domain_fallback_is_conservative():
    values = [Fraction(3, 4)] * 60
    exact = martingale_pvalues(values, exact_limit=4096)
    approx = martingale_pvalues(values, exact_limit=10)
    for pe, pa in zip(exact, approx):
        assert pa >= pe  # directed rounding may only inflate p
        assert float(pa) == pytest.approx(float(pe), rel=1e-9)


def test_closed_form_examples():
    # unanimous polling stream: 2^-n crosses 0.05 at n = 5
    assert closed_form_sample_size(ONE, Fraction(1, 20)) == 5
    assert closed_form_draws(1.0, 0.05) == 5
    # comparison stream at B = 0.53
    b = Fraction(53, 100)
    want = closed_form_draws(0.53, 0.05)
    got = closed_form_sample_size(b, Fraction(1, 20))
    assert got == want
    # cross-check the exact crossing: (1.06)^n >= 20
    assert (2 * b) ** got >= 20
    assert (2 * b) ** (got - 1) < 20


def test_closed_form_not_attainable():
    assert closed_form_sample_size(HALF, Fraction(1, 20)) == NOT_ATTAINABLE
    assert closed_form_sample_size(Fraction(1, 4), Fraction(1, 20)) == NOT_ATTAINABLE


def test_simulation_agrees_with_closed_form_at_zero_error():
    alpha = Fraction(1, 20)
    for value in (Fraction(53, 100), Fraction(3, 5), ONE):
        closed = closed_form_sample_size(value, alpha)
        sim = simulated_sample_size(value, Fraction(0), 0.0, alpha)
        assert sim == closed


def test_estimate_with_total_error_rate_is_sentinel():
    clean = Fraction(53, 100)
    est = estimate_sample_size(clean, clean / 2, 1.0, Fraction(1, 20))
    assert est == NOT_ATTAINABLE


def test_estimate_grows_with_error_rate():
    clean = comparison_clean_value(4000, 190_000)
    err = clean / 2
    alpha = Fraction(1, 20)
    clean_n = estimate_sample_size(clean, err, 0.0, alpha)
    with_errors = estimate_sample_size(clean, err, 0.002, alpha)
    assert clean_n != NOT_ATTAINABLE
    assert with_errors >= clean_n


def test_error_positions_uniform_interleave():
    assert error_positions(0.0, 100) == []
    assert error_positions(0.5, 6) == [2, 4, 6]
    positions = error_positions(0.01, 1000)
    assert len(positions) == 10
    assert positions[0] == 100


def test_clean_value_helpers():
    # margin 4000 of 190000: mean (190000+4000)/380000, v = 4/190
    assert polling_clean_value(4000, 190_000) == Fraction(194_000, 380_000)
    assert comparison_clean_value(4000, 190_000) == Fraction(190_000, 376_000)


def test_draws_to_target():
    alpha = Fraction(1, 20)
    assert draws_to_target(Fraction(1), ONE, alpha) == 5
    assert draws_to_target(Fraction(32), ONE, alpha) == 0
    assert draws_to_target(Fraction(0), ONE, alpha) == NOT_ATTAINABLE
    assert draws_to_target(Fraction(1), HALF, alpha) == NOT_ATTAINABLE


def test_monte_carlo_null_rejection_rate():
    """Populations with mean exactly 1/2 must be rejected at most ~alpha of
    the time (martingale validity)."""
    rng = random.Random(20240101)
    population = [Fraction(0), ONE]  # mean exactly 1/2
    runs = 2000
    rejected = 0
    for _ in range(runs):
        stream = [rng.choice(population) for _ in range(60)]
        if risk_pvalue(stream) <= Fraction(1, 20):
            rejected += 1
    sigma = math.sqrt(0.05 * 0.95 / runs)
    assert rejected / runs <= 0.05 + 3 * sigma