"""Paired t-test on per-fold error rates, stdlib only."""

import math
import statistics

from idastra.errors import DataError, DegenerateInput


def _betacf(a, b, x):
    # Lentz continued fraction for the incomplete beta function.
    max_iter = 300
    eps = 3e-14
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
    for m in range(1, max_iter + 1):
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
        if abs(delta - 1.0) < eps:
            return h
    raise DataError("incomplete beta did not converge")


def betainc_reg(a, b, x):
    """Regularized incomplete beta I_x(a, b)."""
    if not (a > 0 and b > 0):
        raise DataError(f"beta parameters must be positive: {a}, {b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def paired_t_test(first, second):
    """Two-sided paired t-test; returns (t, p).

    All-zero differences carry no signal and raise DegenerateInput.
    Identical nonzero differences give a zero standard deviation, which
    is reported as (+/-inf, 0.0) rather than an error: the direction is
    unambiguous even though the statistic diverges.
    """
    first = list(first)
    second = list(second)
    if len(first) != len(second):
        raise DataError(f"paired samples differ in length: "
                        f"{len(first)} vs {len(second)}")
    n = len(first)
    if n < 2:
        raise DataError(f"paired t-test needs >= 2 pairs, got {n}")
    diffs = [a - b for a, b in zip(first, second)]
    if all(d == 0 for d in diffs):
        raise DegenerateInput("all paired differences are zero")
    mean = statistics.fmean(diffs)
    sd = statistics.stdev(diffs)
    if sd == 0.0:
        return (math.inf if mean > 0 else -math.inf), 0.0
    t = mean / (sd / math.sqrt(n))
    df = n - 1
    p = betainc_reg(df / 2.0, 0.5, df / (df + t * t))
    return t, p
