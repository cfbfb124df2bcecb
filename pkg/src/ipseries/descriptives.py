"""Descriptive statistics for monthly series, including a classical additive decomposition."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .core import MonthlySeries
from .errors import DegenerateError, DimensionError, LengthError, ParameterError

PERIOD = 12


@dataclass(frozen=True)
class SummaryStats:
    """Quartiles and moments of one series.

    ``kurtosis`` is the non-excess Pearson ratio m4 / m2**2 (normal = 3).
    """

    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float
    sd: float
    skewness: float
    kurtosis: float

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Decomposition:
    """Additive split ``observed = trend + seasonal + remainder``.

    ``trend`` and ``remainder`` hold NaN where the centred moving average is
    undefined (six months at each end).
    """

    dates: tuple
    observed: np.ndarray
    trend: np.ndarray
    seasonal: np.ndarray
    remainder: np.ndarray
    figures: np.ndarray
    period: int = PERIOD

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["date", "observed", "trend", "seasonal", "remainder"])

        def cell(v: float) -> str:
            return "" if np.isnan(v) else repr(float(v))

        for k, d in enumerate(self.dates):
            w.writerow([str(d), cell(self.observed[k]), cell(self.trend[k]),
                        cell(self.seasonal[k]), cell(self.remainder[k])])
        return buf.getvalue()


def _quantile7(sorted_x: np.ndarray, p: float) -> float:
    # rank 1 + (n - 1) p with linear interpolation between order statistics
    h = (sorted_x.size - 1) * p
    lo = int(np.floor(h))
    hi = min(lo + 1, sorted_x.size - 1)
    return float(sorted_x[lo] + (h - lo) * (sorted_x[hi] - sorted_x[lo]))


def summary_stats(series: MonthlySeries) -> SummaryStats:
    """Table-style summary of ``series``.

    Quartiles interpolate linearly between order statistics. ``sd`` uses the
    n - 1 denominator, the moment ratios use n.

    Raises
    ------
    LengthError
        Fewer than two observations.
    DegenerateError
        Constant series (shape statistics undefined).
    """
    x = np.asarray(series.values, dtype=float)
    if x.size < 2:
        raise LengthError("summary statistics need at least 2 observations")
    s = np.sort(x)
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d**2))
    if m2 == 0.0:
        raise DegenerateError("constant series: skewness and kurtosis undefined")
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    return SummaryStats(
        min=float(s[0]),
        q1=_quantile7(s, 0.25),
        median=_quantile7(s, 0.5),
        mean=mean,
        q3=_quantile7(s, 0.75),
        max=float(s[-1]),
        sd=float(np.std(x, ddof=1)),
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2,
    )


def midranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(x.size)
    # boundaries of tie blocks in sorted order
    edges = np.flatnonzero(np.diff(xs) != 0) + 1
    starts = np.concatenate([[0], edges])
    ends = np.concatenate([edges, [x.size]])
    for a, b in zip(starts, ends):
        ranks[order[a:b]] = (a + b + 1) / 2.0
    return ranks


def _tie_pairs(x: np.ndarray) -> int:
    _, counts = np.unique(x, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def _kendall_tau_b(x: np.ndarray, y: np.ndarray) -> float:
    n = x.size
    n0 = n * (n - 1) // 2
    tx = _tie_pairs(x)
    ty = _tie_pairs(y)
    # pairwise signs, one row at a time to bound memory at O(n)
    s = 0
    for i in range(n - 1):
        s += int(np.sum(np.sign(x[i + 1 :] - x[i]) * np.sign(y[i + 1 :] - y[i])))
    denom = np.sqrt(float(n0 - tx) * float(n0 - ty))
    return s / denom


def rank_correlation(x: MonthlySeries, y: MonthlySeries, method: str = "spearman") -> float:
    """Spearman rho (on mid-ranks) or Kendall tau-b between two series."""
    a = np.asarray(getattr(x, "values", x), dtype=float)
    b = np.asarray(getattr(y, "values", y), dtype=float)
    if a.size != b.size:
        raise DimensionError(f"lengths differ: {a.size} vs {b.size}")
    if a.size < 3:
        raise LengthError("rank correlation needs at least 3 observations")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise DegenerateError("one input is constant: zero rank variance")
    if method == "spearman":
        ra = midranks(a) - (a.size + 1) / 2.0
        rb = midranks(b) - (b.size + 1) / 2.0
        r = float(ra @ rb / np.sqrt((ra @ ra) * (rb @ rb)))
    elif method == "kendall":
        r = _kendall_tau_b(a, b)
    else:
        raise ParameterError(f"unknown method {method!r}; use 'spearman' or 'kendall'")
    return float(np.clip(r, -1.0, 1.0))


def decompose_additive(series: MonthlySeries) -> Decomposition:
    """Classical moving-average decomposition with period 12.

    The trend is the centred 2x12 moving average. Seasonal figures average the
    detrended values per calendar position and are then centred to sum to 0.
    """
    x = np.asarray(series.values, dtype=float)
    n = x.size
    if n < 2 * PERIOD:
        raise LengthError(f"decomposition needs >= {2 * PERIOD} observations, got {n}")
    w = np.r_[0.5, np.ones(PERIOD - 1), 0.5] / PERIOD
    half = PERIOD // 2
    trend = np.full(n, np.nan)
    trend[half : n - half] = np.convolve(x, w, mode="valid")
    detr = x - trend
    pos = np.arange(n) % PERIOD
    figures = np.array([np.nanmean(detr[pos == k]) for k in range(PERIOD)])
    figures -= figures.mean()
    seasonal = figures[pos]
    remainder = x - trend - seasonal
    return Decomposition(tuple(series.dates()), x.copy(), trend, seasonal, remainder, figures)
