"""Statistical instruments for the verification suites.

Kolmogorov-Smirnov machinery works on the order statistics directly, so
it is exact for atomic reference laws (no binning). The chi-square path
pools cells left to right until every expected count reaches five, the
usual validity rule for the asymptotic chi-square distribution.
"""

import numpy as np
from scipy import stats as sps

from .errors import EmptySample, InsufficientData, TooFewSamples

# Asymptotic Kolmogorov quantiles: c = sqrt(-ln(alpha/2)/2).
_MIN_KS_SAMPLES = 50
_MIN_CHI_TOTAL = 500
_MIN_EXPECTED = 5.0


def _eval_cdf(cdf, xs):
    """Evaluate a CDF on an array, tolerating scalar-only callables."""
    try:
        out = np.asarray(cdf(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(cdf(x)) for x in xs])


def ecdf(samples):
    """Right-continuous empirical CDF as a callable."""
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise EmptySample("ecdf of an empty sample")

    def F(x):
        return np.searchsorted(xs, x, side="right") / xs.size

    return F


def ks_stat(samples, cdf, x_min=None):
    """One-sample KS statistic, optionally restricted to x >= x_min.

    Ties are collapsed to distinct points carrying their full jump, and the
    below-the-jump comparison evaluates the reference one ulp to the left,
    so a sample sitting exactly on a matching reference atom scores zero.
    For distinct samples against a continuous reference this agrees with
    the classical order-statistic formula.

    The restricted form compares the full-sample ECDF to the reference on
    [x_min, inf) only; it is the instrument for laws that are exact above
    a truncation level and deliberately wrong below it.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise EmptySample("ks_stat of an empty sample")
    vals, counts = np.unique(xs, return_counts=True)
    cum = np.cumsum(counts)
    upper = cum / n
    lower = (cum - counts) / n
    F_at = _eval_cdf(cdf, vals)
    F_before = _eval_cdf(cdf, np.nextafter(vals, -np.inf))
    dev = np.maximum(np.abs(upper - F_at), np.abs(lower - F_before))
    if x_min is None:
        return float(dev.max())
    mask = vals >= x_min
    # The flat ECDF stretch entering x_min contributes at the cut point.
    at_cut = abs(np.count_nonzero(xs <= x_min) / n
                 - float(_eval_cdf(cdf, np.array([float(x_min)]))[0]))
    return float(max(dev[mask].max(), at_cut)) if mask.any() else float(at_cut)


def ks_threshold(n, alpha):
    """Asymptotic one-sample KS rejection threshold c(alpha)/sqrt(n)."""
    if n < _MIN_KS_SAMPLES:
        raise TooFewSamples(f"KS threshold needs n >= {_MIN_KS_SAMPLES}, got {n}")
    return float(np.sqrt(-0.5 * np.log(alpha / 2.0)) / np.sqrt(n))


def ks_two_sample(a, b):
    """Two-sample KS statistic evaluated over the pooled sample points."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptySample("two-sample KS with an empty side")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def pooled_chi_square(observed, expected):
    """Chi-square p-value after pooling adjacent cells to expected >= 5.

    Cells are accumulated left to right; a trailing remainder folds into
    the last closed cell. degrees of freedom = pooled cells - 1.
    """
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    pooled_obs, pooled_exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= _MIN_EXPECTED:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)
            acc_o = acc_e = 0.0
    if (acc_e > 0.0 or acc_o > 0.0) and pooled_exp:
        pooled_obs[-1] += acc_o
        pooled_exp[-1] += acc_e
    if len(pooled_exp) < 2:
        raise InsufficientData("fewer than two cells after pooling")
    chi2 = float(np.sum((np.array(pooled_obs) - np.array(pooled_exp)) ** 2
                        / np.array(pooled_exp)))
    return float(sps.chi2.sf(chi2, len(pooled_exp) - 1))


def poisson_pmf_test(counts, rate):
    """Chi-square p-value of an integer histogram against a Poisson pmf.

    counts[m] is the number of observations equal to m; the tail mass
    beyond the histogram folds into the last cell.
    """
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total < _MIN_CHI_TOTAL:
        raise InsufficientData(
            f"Poisson test needs >= {_MIN_CHI_TOTAL} observations, got {total}")
    support = np.arange(counts.size)
    expected = total * sps.poisson.pmf(support, rate)
    expected[-1] += total * sps.poisson.sf(counts.size - 1, rate)
    return pooled_chi_square(counts, expected)
