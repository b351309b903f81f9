"""Small statistics helpers for the Monte Carlo harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

Z95 = 1.959963984540054  # two-sided 95% normal quantile
Z95_ONE_SIDED = 1.6448536269514722


def wilson_interval(hits: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score 95% interval for a binomial proportion.

    Behaves sensibly at hits=0 (upper bound ~ z^2/n, the rule-of-three
    scale) and hits=n, unlike the Wald interval.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= hits <= n:
        raise ValueError("hits must lie in [0, n]")
    p = hits / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if hits == 0 else max(center - half, 0.0)
    hi = 1.0 if hits == n else min(center + half, 1.0)
    return lo, hi


@dataclass
class WlsFit:
    slope: float
    intercept: float
    stderr: float
    residuals: np.ndarray


def weighted_least_squares(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> WlsFit:
    """Straight-line weighted least squares with intercept.

    Weights should be inverse variances; the slope standard error is scaled
    by the weighted residual variance (n-2 degrees of freedom), so exact
    linear data yields stderr 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two points")
    sw = w.sum()
    xbar = (w * x).sum() / sw
    ybar = (w * y).sum() / sw
    sxx = (w * (x - xbar) ** 2).sum()
    if sxx == 0:
        raise ValueError("degenerate design: all x equal")
    slope = (w * (x - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = y - (intercept + slope * x)
    dof = max(len(x) - 2, 1)
    sigma2 = (w * resid**2).sum() / dof
    stderr = float(np.sqrt(sigma2 / sxx))
    return WlsFit(float(slope), float(intercept), stderr, resid)


def ks_distance_to_exp(sample: np.ndarray) -> float:
    """One-sample Kolmogorov distance to the Exp(1) CDF 1 - e^(-x)."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    cdf = 1.0 - np.exp(-x)
    hi = np.abs(np.arange(1, n + 1) / n - cdf).max()
    lo = np.abs(np.arange(0, n) / n - cdf).max()
    return float(max(hi, lo))


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Two-sample KS statistic and asymptotic p-value."""
    res = sps.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def covariance_lower_bound(
    x: np.ndarray, y: np.ndarray, z: float = Z95_ONE_SIDED
) -> tuple[float, float]:
    """(cov_hat, one-sided 95% lower confidence bound) via the delta method."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 3 or len(y) != n:
        raise ValueError("need paired samples of length >= 3")
    dx = x - x.mean()
    dy = y - y.mean()
    cov = (dx * dy).sum() / (n - 1)
    var_cov = ((dx * dy - cov) ** 2).sum() / (n - 1) / n
    return float(cov), float(cov - z * np.sqrt(var_cov))
