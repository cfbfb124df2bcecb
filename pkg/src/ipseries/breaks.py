"""Structural change in the mean of a series.

Fluctuation processes test whether the mean moved at all. Break dating then
finds the optimal partition by dynamic programming and picks the number of
breaks by BIC. Two dated break sets are finally merged into common quiet
periods.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import kolmogorov, log_ndtr, ndtr

from . import kernels, tables
from .core import MonthDate, MonthlySeries, Segment
from .errors import DegenerateError, LengthError, ParameterError

KINDS = ("OLS-CUSUM", "OLS-MOSUM", "Rec-CUSUM", "Rec-MOSUM")
MACHINE_EPS = float(np.finfo(float).eps)


# --------------------------------------------------------------------------
# fluctuation processes


@dataclass(frozen=True)
class FluctuationProcess:
    """Standardised residual process of a mean-only model.

    CUSUM paths start with the empty partial sum, so the OLS-CUSUM path has
    ``n + 1`` points and is pinned to 0 at both ends.
    """

    kind: str
    path: np.ndarray
    n: int
    sigma: float
    bandwidth: float | None = None

    @property
    def recursive(self) -> bool:
        return self.kind.startswith("Rec")

    @property
    def is_mosum(self) -> bool:
        return self.kind.endswith("MOSUM")

    def grid(self) -> np.ndarray:
        """Time points in [0, 1] for plotting the path."""
        m = self.path.size
        if self.is_mosum:
            nh = (self.n - 1 if self.recursive else self.n) * (self.bandwidth or 0)
            start = math.floor(nh) / (self.n - 1 if self.recursive else self.n)
            return np.linspace(start, 1.0, m)
        return np.linspace(0.0, 1.0, m)

    def to_dict(self) -> dict:
        return {
            "bandwidth": self.bandwidth,
            "kind": self.kind,
            "n": self.n,
            "path": np.round(self.path, 8).tolist(),
            "sigma": self.sigma,
        }


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ParameterError(f"unknown process kind {kind!r}; expected one of {KINDS}")


def recursive_residuals(y: np.ndarray) -> np.ndarray:
    """Standardised one-step prediction errors of the running mean, t = 2..n."""
    y = np.asarray(y, dtype=float)
    t = np.arange(1, y.size)  # number of points already seen
    prev_mean = np.cumsum(y)[:-1] / t
    return (y[1:] - prev_mean) / np.sqrt(1.0 + 1.0 / t)


def efp(series, kind: str = "OLS-CUSUM", h: float = 0.15) -> FluctuationProcess:
    """Empirical fluctuation process for ``y ~ 1``.

    Parameters
    ----------
    series : MonthlySeries or array_like
    kind : {"OLS-CUSUM", "OLS-MOSUM", "Rec-CUSUM", "Rec-MOSUM"}
    h : float
        MOSUM window as a fraction of the sample.

    Notes
    -----
    A constant series has no fluctuation at all and yields an all-zero path.
    """
    _check_kind(kind)
    if not 0 < h < 1:
        raise ParameterError(f"bandwidth h must lie in (0, 1), got {h}")
    y = np.asarray(getattr(series, "values", series), dtype=float)
    n = y.size
    if n < 2:
        raise LengthError("a fluctuation process needs at least 2 observations")

    if kind.startswith("OLS"):
        e = y - y.mean()
        sigma = math.sqrt(float(e @ e) / (n - 1))
        scale_n = n
    else:
        if n < 3:
            raise LengthError("recursive residuals need at least 3 observations")
        e = recursive_residuals(y)
        sigma = float(np.std(e, ddof=1))
        scale_n = n - 1

    mosum = kind.endswith("MOSUM")
    nh = math.floor(scale_n * h) if mosum else 0
    if mosum and nh < 2:
        raise ParameterError(f"window floor(n*h) = {nh} is below 2")

    cs = np.concatenate([[0.0], np.cumsum(e)])
    raw = cs[nh:] - cs[: cs.size - nh] if mosum else cs
    # residuals at rounding level mean the series is constant in all but name
    noise_floor = 64 * MACHINE_EPS * float(np.max(np.abs(y)))
    if not np.isfinite(sigma) or sigma <= noise_floor:
        path = np.zeros(raw.size)
    else:
        path = raw / (sigma * math.sqrt(scale_n))
    if kind == "OLS-CUSUM":
        path[-1] = 0.0  # OLS residuals sum to zero; drop the rounding residue
    return FluctuationProcess(kind, path, n, sigma, h if mosum else None)


@dataclass(frozen=True)
class ScTestResult:
    """Outcome of a fluctuation test.

    ``p_is_table_floor`` marks MOSUM p-values clipped at the smallest
    tabulated level; ``p_below_eps`` marks p-values under machine epsilon
    (reported as epsilon).
    """

    kind: str
    statistic: float
    p_value: float
    p_is_table_floor: bool = False
    p_below_eps: bool = False

    def reject(self, alpha: float = 0.05) -> bool:
        return self.p_value <= alpha

    def p_label(self) -> str:
        if self.p_below_eps:
            return "< 2.2e-16"
        if self.p_is_table_floor:
            return "0.01"
        return f"{self.p_value:.4g}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "p_below_eps": self.p_below_eps,
            "p_is_table_floor": self.p_is_table_floor,
            "p_label": self.p_label(),
            "p_value": self.p_value,
            "statistic": round(self.statistic, 10),
        }


def _rec_cusum_p(x: float) -> float:
    # crossing of the boundary x (1 + 2t) by Brownian motion on [0, 1]
    p = 2.0 * (1.0 - ndtr(3.0 * x) + math.exp(-4.0 * x * x) * ndtr(x))
    return min(1.0, p)


def _rec_cusum_stat(process: FluctuationProcess) -> float:
    t = np.linspace(0.0, 1.0, process.path.size)
    return float(np.max(np.abs(process.path) / (1.0 + 2.0 * t)))


def sctest(process: FluctuationProcess, alpha: float = 0.05) -> ScTestResult:
    """Test the null of no structural change.

    ``alpha`` does not change the p-value; it is accepted so callers can pass a
    single configuration through (see :meth:`ScTestResult.reject`).
    """
    if process.path.size == 0:
        raise LengthError("empty fluctuation process")
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0, 1)")
    kind = process.kind
    if kind == "OLS-CUSUM":
        stat = float(np.max(np.abs(process.path)))
        p = float(kolmogorov(stat))
    elif kind == "Rec-CUSUM":
        stat = _rec_cusum_stat(process)
        p = _rec_cusum_p(stat)
    else:
        stat = float(np.max(np.abs(process.path)))
        p, floor = tables.mosum_pvalue(stat, process.bandwidth, process.recursive)
        return ScTestResult(kind, stat, float(p), p_is_table_floor=floor)
    below = p < MACHINE_EPS
    return ScTestResult(kind, stat, max(p, MACHINE_EPS), p_below_eps=below)


def boundary(process: FluctuationProcess, alpha: float = 0.05) -> np.ndarray:
    """Level-``alpha`` critical boundary along the path (for plotting)."""
    m = process.path.size
    if process.kind == "OLS-CUSUM":
        c = brentq(lambda x: kolmogorov(x) - alpha, 0.1, 10.0)
        return np.full(m, c)
    if process.kind == "Rec-CUSUM":
        c = brentq(lambda x: _rec_cusum_p(x) - alpha, 0.05, 10.0)
        return c * (1.0 + 2.0 * np.linspace(0.0, 1.0, m))
    crit = tables.mosum_critical_values(process.bandwidth, process.recursive)
    levels = np.asarray(tables.MOSUM_LEVELS)
    c = float(np.interp(alpha, levels[::-1], crit[::-1]))
    return np.full(m, c)


# --------------------------------------------------------------------------
# break dating


@dataclass(frozen=True)
class Break:
    """One break: ``index`` is the last observation of the ending regime."""

    index: int
    date: MonthDate
    ci_low: MonthDate | None = None
    ci_high: MonthDate | None = None
    ci_low_index: int | None = None
    ci_high_index: int | None = None
    widened: bool = False

    def to_dict(self) -> dict:
        return {
            "ci_high": None if self.ci_high is None else str(self.ci_high),
            "ci_low": None if self.ci_low is None else str(self.ci_low),
            "date": str(self.date),
            "index": self.index,
            "widened": self.widened,
        }


@dataclass(frozen=True)
class BreakpointSet:
    breaks: tuple[Break, ...]
    rss: float
    bic: float
    n: int
    min_len: int
    start: MonthDate
    rss_by_m: tuple[float, ...] = ()
    bic_by_m: tuple[float, ...] = ()
    partitions: tuple[tuple[int, ...], ...] = ()
    level: float | None = None

    @property
    def m(self) -> int:
        return len(self.breaks)

    @property
    def indices(self) -> list[int]:
        return [b.index for b in self.breaks]

    @property
    def dates(self) -> list[MonthDate]:
        return [b.date for b in self.breaks]

    def to_dict(self) -> dict:
        return {
            "bic": self.bic,
            "bic_by_m": list(self.bic_by_m),
            "breaks": [b.to_dict() for b in self.breaks],
            "level": self.level,
            "m": self.m,
            "min_len": self.min_len,
            "n": self.n,
            "partitions": [list(p) for p in self.partitions],
            "rss": self.rss,
            "rss_by_m": list(self.rss_by_m),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["ci_low", "date", "ci_high"])
        for b in self.breaks:
            w.writerow([b.ci_low.label() if b.ci_low else "", b.date.label(),
                        b.ci_high.label() if b.ci_high else ""])
        return buf.getvalue()


def partition_rss(y: np.ndarray, breaks) -> float:
    """Residual sum of squares of the piecewise-constant fit with ``breaks``."""
    y = np.asarray(y, dtype=float)
    edges = [-1, *breaks, y.size - 1]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        seg = y[a + 1 : b + 1]
        total += float(np.sum((seg - seg.mean()) ** 2))
    return total


def _bic(rss: float, n: int, m: int) -> float:
    tiny = np.finfo(float).tiny
    return n * math.log(max(rss / n, tiny)) + 2 * (m + 1) * math.log(n)


def date_breakpoints(series, h: float = 0.15, max_breaks: int | None = None) -> BreakpointSet:
    """Optimal mean-shift breaks with the number chosen by BIC.

    Parameters
    ----------
    series : MonthlySeries or array_like
    h : float
        Minimum regime length as a fraction of n (``floor(n h)`` points).
    max_breaks : int, optional
        Largest break count considered. Defaults to the most the minimum
        regime length allows, capped at ``floor(1/h) - 1``.

    Raises
    ------
    ParameterError
        ``floor(n h) < 2`` or ``max_breaks`` infeasible.
    """
    y = np.asarray(getattr(series, "values", series), dtype=float)
    start = getattr(series, "start", MonthDate(1, 1))
    n = y.size
    if not 0 < h < 1:
        raise ParameterError(f"h must lie in (0, 1), got {h}")
    min_len = math.floor(n * h)
    if min_len < 2:
        raise ParameterError(f"minimum regime length floor(n*h) = {min_len} is below 2")
    feasible = n // min_len - 1
    if max_breaks is None:
        max_breaks = min(feasible, math.floor(1 / h) - 1)
    if max_breaks < 0 or max_breaks > feasible:
        raise ParameterError(
            f"max_breaks={max_breaks} infeasible: at most {feasible} with regimes of {min_len}"
        )

    rss_tab = kernels.segment_rss(y, min_len)
    cost, back = kernels.partition_dp(rss_tab, min_len, max_breaks)

    parts: list[tuple[int, ...]] = []
    rss_m: list[float] = []
    bic_m: list[float] = []
    for m in range(max_breaks + 1):
        bps = []
        j = n - 1
        for k in range(m, 0, -1):
            j = int(back[k, j])
            bps.append(j)
        bps = tuple(sorted(bps))
        parts.append(bps)
        r = partition_rss(y, bps)
        rss_m.append(r)
        bic_m.append(_bic(r, n, m))
    best = int(np.argmin(bic_m))
    chosen = tuple(Break(i, start + i) for i in parts[best])
    return BreakpointSet(chosen, rss_m[best], bic_m[best], n, min_len, start,
                         tuple(rss_m), tuple(bic_m), tuple(parts))


def pargmax(x, xi: float = 1.0, phi1: float = 1.0, phi2: float = 1.0):
    """CDF of the location of the maximum of a two-sided Brownian motion with
    drift, the limit law of a break date estimator.

    ``phi1``/``phi2`` are the noise standard deviations before/after the
    break and ``xi`` the ratio of the regressor second moments.
    """
    x = np.asarray(x, dtype=float)
    phi = xi * (phi2 / phi1) ** 2
    out = np.empty_like(x)
    neg = x < 0
    log2pi = math.log(2 * math.pi)

    a = np.abs(x[neg])
    if a.size:
        frac = xi / phi
        out[neg] = (
            -np.exp(np.log(a) / 2 - a / 8 - log2pi / 2)
            - (phi / xi * (phi + 2 * xi) / (phi + xi))
            * np.exp(frac * (1 + frac) * a / 2 + log_ndtr(-(0.5 + frac) * np.sqrt(a)))
            + np.exp(np.log(a / 2 - 2 + (phi + 2 * xi) ** 2 / ((phi + xi) * xi))
                     + log_ndtr(-np.sqrt(a) / 2))
        )
    b = x[~neg]
    if b.size:
        frac = xi**2 / phi
        with np.errstate(divide="ignore"):
            lb = np.log(b)
        out[~neg] = (
            1
            + math.sqrt(frac) * np.exp(lb / 2 - frac * b / 8 - log2pi / 2)
            + (xi / phi * (2 * phi + xi) / (phi + xi))
            * np.exp((phi + xi) * b / 2 + log_ndtr(-(phi + xi / 2) / math.sqrt(phi) * np.sqrt(b)))
            - np.exp(np.log((2 * phi + xi) ** 2 / ((phi + xi) * phi) - 2 + frac * b / 2)
                     + log_ndtr(-math.sqrt(frac) * np.sqrt(b) / 2))
        )
    return out if out.ndim else float(out)


def _pargmax_quantile(q: float, xi: float, phi1: float, phi2: float) -> float:
    f = lambda v: float(pargmax(v, xi, phi1, phi2)) - q  # noqa: E731
    lo, hi = -10.0, 10.0
    while f(lo) > 0:
        lo *= 2
    while f(hi) < 0:
        hi *= 2
    return brentq(f, lo, hi, xtol=1e-10)


def breakpoint_confint(series, bps: BreakpointSet, level: float = 0.95) -> BreakpointSet:
    """Fill asymptotic confidence intervals for each break.

    Each interval uses the two adjacent regimes: the shift ``delta`` in means
    and the regime variances ``RSS_i / n_i``. Endpoints are rounded outward to
    whole months. A break whose interval reaches past a neighbouring break or
    the sample edge is clipped and marked ``widened``.
    """
    if not 0 < level < 1:
        raise ParameterError("level must lie in (0, 1)")
    y = np.asarray(getattr(series, "values", series), dtype=float)
    n = y.size
    idx = bps.indices
    edges = [-1, *idx, n - 1]
    segs = [y[a + 1 : b + 1] for a, b in zip(edges, edges[1:])]
    a2 = (1 - level) / 2
    out = []
    for k, bp in enumerate(idx):
        left, right = segs[k], segs[k + 1]
        delta = right.mean() - left.mean()
        var1 = float(np.mean((left - left.mean()) ** 2))
        var2 = float(np.mean((right - right.mean()) ** 2))
        widened = False
        if delta == 0.0 or var1 == 0.0 or var2 == 0.0:
            lo_i, hi_i, widened = edges[k] + 1, edges[k + 2] - 1, True
        else:
            phi1, phi2 = math.sqrt(var1), math.sqrt(var2)
            q_lo = _pargmax_quantile(a2, 1.0, phi1, phi2)
            q_hi = _pargmax_quantile(1 - a2, 1.0, phi1, phi2)
            scale = var1 / delta**2
            lo_i = bp - math.ceil(q_hi * scale)
            hi_i = bp - math.floor(q_lo * scale)
        floor_i, ceil_i = max(edges[k] + 1, 0), min(edges[k + 2] - 1, n - 1)
        if lo_i < floor_i:
            lo_i, widened = floor_i, True
        if hi_i > ceil_i:
            hi_i, widened = ceil_i, True
        out.append(Break(bp, bps.start + bp, bps.start + lo_i, bps.start + hi_i,
                         lo_i, hi_i, widened))
    return BreakpointSet(tuple(out), bps.rss, bps.bic, bps.n, bps.min_len, bps.start,
                         bps.rss_by_m, bps.bic_by_m, bps.partitions, level)


# --------------------------------------------------------------------------
# segmentation


@dataclass(frozen=True)
class SegmentSet:
    segments: tuple[Segment, ...] = field(default_factory=tuple)
    clusters: tuple[tuple[MonthDate, ...], ...] = ()

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def to_list(self) -> list[dict]:
        return [{"end": str(s.end), "label": s.label, "length": len(s), "start": str(s.start)}
                for s in self.segments]


def _break_dates(b) -> list[MonthDate]:
    return sorted(b.dates if isinstance(b, BreakpointSet) else b)


def break_clusters(first, second) -> list[tuple[MonthDate, ...]]:
    """Group two break lists into co-occurring clusters.

    Two breaks from different lists form a cluster when each is the other's
    nearest break in the opposite list and nothing from either list lies
    between them. Everything else stays a singleton.
    """
    a = _break_dates(first)
    b = _break_dates(second)
    merged = sorted([(d, 0) for d in a] + [(d, 1) for d in b])

    def nearest(d: MonthDate, pool: list[MonthDate]):
        if not pool:
            return None
        return min(pool, key=lambda p: (abs(d.distance(p)), p))

    clusters = []
    used = [False] * len(merged)
    for i, (d, src) in enumerate(merged):
        if used[i]:
            continue
        if i + 1 < len(merged) and not used[i + 1]:
            d2, src2 = merged[i + 1]
            if src2 != src:
                pool_other = b if src == 0 else a
                pool_self = a if src == 0 else b
                if nearest(d, pool_other) == d2 and nearest(d2, pool_self) == d:
                    clusters.append((d, d2))
                    used[i] = used[i + 1] = True
                    continue
        clusters.append((d,))
        used[i] = True
    return clusters


def derive_segments(first, second, span_start: MonthDate, span_end: MonthDate) -> SegmentSet:
    """Quiet periods between the break clusters of two series.

    A segment starts the month after the later break of one cluster and ends
    the month before the earlier break of the next. The first segment starts
    at ``span_start`` and the last ends at ``span_end``. Empty gaps are
    dropped.
    """
    clusters = break_clusters(first, second)
    starts = [span_start] + [max(c) + 1 for c in clusters]
    ends = [min(c) - 1 for c in clusters] + [span_end]
    segs = []
    for s, e in zip(starts, ends):
        s = max(s, span_start)
        e = min(e, span_end)
        if s <= e:
            segs.append(Segment(len(segs) + 1, s, e))
    return SegmentSet(tuple(segs), tuple(clusters))
