"""Statistical debugging mathematics.

Zero-failure Clopper-Pearson intervals, beta quantiles (self-contained
continued-fraction incomplete beta, accurate to 1e-10 for the integer
shapes used here), the two headline confidence-interval theorems, and
the gentle-measurement disturbance bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadAlpha, BadArgs, ShapeUnderflow, ZeroShots


@dataclass(frozen=True)
class AssertionCounts:
    failures: tuple  # k_m per site, program order
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise ZeroShots(f"shots = {self.shots}")
        if any(k < 0 for k in self.failures):
            raise BadArgs("negative failure count")
        if sum(self.failures) > self.shots:
            raise BadArgs("more failures than shots")


@dataclass(frozen=True)
class SegmentVerdict:
    w_minus: float
    w_center: float
    w_plus: float
    epsilon: float | None
    verdict: str  # "Incorrect" | "Correct" | "Inconclusive"


def cp_zero_interval(k: int, alpha: float):
    """Zero-failure Clopper-Pearson interval (0, 1 - (alpha/2)^(1/k))."""
    if k < 1:
        raise ZeroShots(f"k = {k}")
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha = {alpha}")
    return 0.0, 1.0 - (alpha / 2.0) ** (1.0 / k)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 500):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def incomplete_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def beta_quantile(p: float, a: float, b: float) -> float:
    """x with I_x(a, b) = p, by bisection to 1e-10 in CDF value."""
    if not 0.0 < p < 1.0:
        raise BadArgs(f"p = {p}")
    if a < 1 or b < 1:
        raise BadArgs(f"shapes a = {a}, b = {b} must be >= 1")
    lo, hi = 0.0, 1.0
    # a = 1 has the closed form 1 - (1-p)^(1/b); use it to shrink the
    # bracket before bisection
    if a == 1:
        guess = 1.0 - (1.0 - p) ** (1.0 / b)
        lo = max(0.0, guess - 1e-6)
        hi = min(1.0, guess + 1e-6)
        if incomplete_beta(lo, a, b) > p:
            lo = 0.0
        if incomplete_beta(hi, a, b) < p:
            hi = 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v = incomplete_beta(mid, a, b)
        if abs(v - p) <= 1e-12 or hi - lo <= 1e-15:
            return mid
        if v < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theorem1_intervals(l: int, k: int):
    """95% bounds after k clean runs of an l-assertion scheme.

    Returns ((0, d_hi), (f_lo, 1)) with d_hi = (0.9 l + sqrt(l))/sqrt(k)
    and f_lo = cos(d_hi).
    """
    if l < 1 or k < 1:
        raise BadArgs(f"l = {l}, k = {k}")
    d_hi = (0.9 * l + math.sqrt(l)) / math.sqrt(k)
    return (0.0, d_hi), (math.cos(d_hi), 1.0)


def theorem1_sample_ok(l: int, k: int) -> bool:
    """The bounds assume k much larger than l^2; this is the k >= 100 l^2
    threshold used to flag thin campaigns."""
    return k >= 100 * l * l


def theorem2_report(counts: AssertionCounts, epsilons=None):
    """Per-site beta-quantile intervals, verdicts, and the error budget.

    Site m gets w = B(alpha, k_m + 1, k - sum_{i<=m} k_i) at alpha in
    {0.025, 0.5, 0.975}.  With a declared tolerance eps_m, the verdict is
    Incorrect when eps_m < w-, Correct when eps_m > w+, else
    Inconclusive.  delta = sum sqrt(w_c) + sqrt(sum (sqrt(w+) - sqrt(w_c))^2).
    """
    l = len(counts.failures)
    if epsilons is not None:
        if len(epsilons) != l:
            raise BadArgs(f"{len(epsilons)} epsilons for {l} sites")
        if any(not 0.0 <= e <= 1.0 for e in epsilons):
            raise BadArgs("epsilons must be in [0, 1]")
    verdicts = []
    running = 0
    sum_wc_sqrt = 0.0
    sum_sq = 0.0
    for m, km in enumerate(counts.failures):
        running += km
        b = counts.shots - running
        if b < 1:
            raise ShapeUnderflow(
                f"site {m + 1}: k - cumulative failures = {b} < 1"
            )
        a = km + 1
        w_minus = beta_quantile(0.025, a, b)
        w_center = beta_quantile(0.5, a, b)
        w_plus = beta_quantile(0.975, a, b)
        eps = None if epsilons is None else float(epsilons[m])
        if eps is None:
            verdict = "Inconclusive"
        elif eps < w_minus:
            verdict = "Incorrect"
        elif eps > w_plus:
            verdict = "Correct"
        else:
            verdict = "Inconclusive"
        verdicts.append(SegmentVerdict(w_minus, w_center, w_plus, eps, verdict))
        sum_wc_sqrt += math.sqrt(w_center)
        sum_sq += (math.sqrt(w_plus) - math.sqrt(w_center)) ** 2
    delta = sum_wc_sqrt + math.sqrt(sum_sq)
    return verdicts, delta


def gentle_bounds(eps: float):
    """Disturbance bounds for a passed assertion with failure probability
    eps: trace distance at most eps + sqrt(eps (1 - eps)), fidelity at
    least sqrt(1 - eps)."""
    if not 0.0 <= eps <= 1.0:
        raise BadArgs(f"eps = {eps}")
    d_upper = eps + math.sqrt(eps * (1.0 - eps))
    f_lower = math.sqrt(1.0 - eps)
    return min(d_upper, 1.0), f_lower
