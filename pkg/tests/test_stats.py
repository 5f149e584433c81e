"""Confidence-interval mathematics, cross-checked against scipy."""

import math

import numpy as np
import pytest
import scipy.special
import scipy.stats

from projassert.errors import BadAlpha, BadArgs, ShapeUnderflow, ZeroShots
from projassert.stats import (
    AssertionCounts,
    beta_quantile,
    cp_zero_interval,
    gentle_bounds,
    incomplete_beta,
    theorem1_intervals,
    theorem1_sample_ok,
    theorem2_report,
)


def test_cp_zero_interval_closed_form_and_scipy():
    for k in (1, 10, 100, 5000):
        lo, hi = cp_zero_interval(k, 0.05)
        assert lo == 0.0
        assert hi == pytest.approx(1.0 - 0.025 ** (1.0 / k), abs=1e-15)
        # the zero-failure upper limit is the 1 - alpha/2 beta(1, k) quantile
        assert hi == pytest.approx(scipy.stats.beta.ppf(0.975, 1, k), abs=1e-12)


def test_cp_zero_interval_validation():
    with pytest.raises(ZeroShots):
        cp_zero_interval(0, 0.05)
    with pytest.raises(BadAlpha):
        cp_zero_interval(10, 0.0)
    with pytest.raises(BadAlpha):
        cp_zero_interval(10, 1.5)


def test_incomplete_beta_against_scipy():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(300):
        a = float(rng.integers(1, 60))
        b = float(rng.integers(1, 60))
        x = float(rng.uniform(1e-6, 1.0 - 1e-6))
        mine = incomplete_beta(x, a, b)
        ref = scipy.special.betainc(a, b, x)
        worst = max(worst, abs(mine - ref))
    assert worst < 1e-12


def test_incomplete_beta_edges():
    assert incomplete_beta(0.0, 2, 3) == 0.0
    assert incomplete_beta(1.0, 2, 3) == 1.0


def test_beta_quantile_against_scipy():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        a = float(rng.integers(1, 40))
        b = float(rng.integers(1, 40))
        p = float(rng.uniform(0.001, 0.999))
        mine = beta_quantile(p, a, b)
        ref = scipy.stats.beta.ppf(p, a, b)
        worst = max(worst, abs(mine - ref))
    assert worst < 1e-9


def test_beta_quantile_a_equals_one_closed_form_sweep():
    worst = 0.0
    for b in list(range(1, 51)) + [100, 500, 2000]:
        for p in (0.001, 0.025, 0.1, 0.5, 0.9, 0.975, 0.999):
            mine = beta_quantile(p, 1, b)
            closed = 1.0 - (1.0 - p) ** (1.0 / b)
            worst = max(worst, abs(mine - closed))
    assert worst < 1e-10


def test_beta_quantile_is_monotone_in_p():
    qs = [beta_quantile(p, 3, 17) for p in np.linspace(0.01, 0.99, 25)]
    assert all(x < y for x, y in zip(qs, qs[1:]))


def test_beta_quantile_validation():
    with pytest.raises(BadArgs):
        beta_quantile(0.0, 1, 10)
    with pytest.raises(BadArgs):
        beta_quantile(1.0, 1, 10)
    with pytest.raises(BadArgs):
        beta_quantile(0.5, 0.5, 10)


def test_theorem1_intervals_formula():
    (d_lo, d_hi), (f_lo, f_hi) = theorem1_intervals(4, 10000)
    assert d_lo == 0.0 and f_hi == 1.0
    assert d_hi == pytest.approx((0.9 * 4 + 2.0) / 100.0, abs=1e-15)
    assert f_lo == pytest.approx(math.cos(d_hi), abs=1e-15)
    with pytest.raises(BadArgs):
        theorem1_intervals(0, 100)


def test_theorem1_sample_threshold():
    assert theorem1_sample_ok(1, 100)
    assert not theorem1_sample_ok(1, 99)
    assert theorem1_sample_ok(4, 1600)
    assert not theorem1_sample_ok(4, 1599)


def test_theorem2_quantiles_and_budget_recomputed():
    counts = AssertionCounts((2, 0), 100)
    verdicts, delta = theorem2_report(counts)
    # site 1: beta(3, 98); site 2: beta(1, 98) after removing the two
    # earlier failures from the denominator
    assert verdicts[0].w_minus == pytest.approx(
        scipy.stats.beta.ppf(0.025, 3, 98), abs=1e-9
    )
    assert verdicts[0].w_plus == pytest.approx(
        scipy.stats.beta.ppf(0.975, 3, 98), abs=1e-9
    )
    assert verdicts[1].w_center == pytest.approx(
        scipy.stats.beta.ppf(0.5, 1, 98), abs=1e-9
    )
    centers = [v.w_center for v in verdicts]
    pluses = [v.w_plus for v in verdicts]
    expect = sum(math.sqrt(c) for c in centers) + math.sqrt(
        sum((math.sqrt(p) - math.sqrt(c)) ** 2 for p, c in zip(pluses, centers))
    )
    assert delta == pytest.approx(expect, abs=1e-12)


def test_theorem2_verdicts_follow_tolerances():
    counts = AssertionCounts((0,), 200)
    verdicts, _ = theorem2_report(counts, [1e-9])
    assert verdicts[0].verdict == "Incorrect"
    verdicts, _ = theorem2_report(counts, [0.5])
    assert verdicts[0].verdict == "Correct"
    verdicts, _ = theorem2_report(counts, [verdicts[0].w_center])
    assert verdicts[0].verdict == "Inconclusive"
    verdicts, _ = theorem2_report(counts)
    assert verdicts[0].verdict == "Inconclusive"


def test_theorem2_shape_underflow_and_validation():
    with pytest.raises(ShapeUnderflow):
        theorem2_report(AssertionCounts((10,), 10))
    with pytest.raises(BadArgs):
        theorem2_report(AssertionCounts((0, 0), 100), [0.1])
    with pytest.raises(BadArgs):
        theorem2_report(AssertionCounts((0,), 100), [1.5])
    with pytest.raises(BadArgs):
        AssertionCounts((-1,), 10)
    with pytest.raises(BadArgs):
        AssertionCounts((6, 6), 10)
    with pytest.raises(ZeroShots):
        AssertionCounts((0,), 0)


def test_gentle_bounds_values():
    d, f = gentle_bounds(0.0)
    assert d == 0.0 and f == 1.0
    d, f = gentle_bounds(0.5)
    assert d == pytest.approx(1.0, abs=1e-12)  # 0.5 + 0.5, clamped at 1
    assert f == pytest.approx(math.sqrt(0.5), abs=1e-12)
    with pytest.raises(BadArgs):
        gentle_bounds(-0.1)
    with pytest.raises(BadArgs):
        gentle_bounds(1.1)
