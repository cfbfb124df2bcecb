"""Hot inner loops, each in a numba and a numpy flavour.

The public names (``airline_residuals``, ``outlier_scan``, ``segment_rss``,
``partition_dp``) point at the numba versions unless ``IPSERIES_DISABLE_NUMBA``
is set. Both flavours stay importable so tests and the benchmark can compare
them directly.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from ._accel import USE_NUMBA, njit

# --------------------------------------------------------------------------
# airline-model innovations: e_t = z_t + th e_{t-1} + Th e_{t-12} - th Th e_{t-13}


@njit
def _airline_residuals_nb(z, theta, seasonal_theta):
    n = z.shape[0]
    e = np.empty(n)
    for t in range(n):
        v = z[t]
        if t >= 1:
            v += theta * e[t - 1]
        if t >= 12:
            v += seasonal_theta * e[t - 12]
        if t >= 13:
            v -= theta * seasonal_theta * e[t - 13]
        e[t] = v
    return e


def _airline_residuals_np(z, theta, seasonal_theta):
    a = np.zeros(14)
    a[0] = 1.0
    a[1] = -theta
    a[12] = -seasonal_theta
    a[13] = theta * seasonal_theta
    return lfilter([1.0], a, np.asarray(z, dtype=float))


# --------------------------------------------------------------------------
# outlier scan: for every start t0, regress the residual tail on a response
# pattern. Returns numerator sum(r_j e_{t0+j}) and denominator sum(r_j^2),
# restricted to residual positions >= first.


@njit
def _outlier_scan_nb(e, resp, first):
    n = e.shape[0]
    num = np.zeros(n)
    den = np.zeros(n)
    csum = np.zeros(n + 1)
    for j in range(n):
        csum[j + 1] = csum[j] + resp[j] * resp[j]
    for t0 in range(n):
        j0 = first - t0 if first > t0 else 0
        if j0 >= n - t0:
            continue
        num[t0] = np.dot(resp[j0 : n - t0], e[t0 + j0 :])
        den[t0] = csum[n - t0] - csum[j0]
    return num, den


def _outlier_scan_np(e, resp, first):
    n = e.shape[0]
    masked = np.where(np.arange(n) >= first, e, 0.0)
    full = np.correlate(masked, resp[:n], mode="full")
    num = full[n - 1 :]
    csum = np.concatenate([[0.0], np.cumsum(resp[:n] ** 2)])
    t0 = np.arange(n)
    j0 = np.maximum(first - t0, 0)
    den = csum[n - t0] - csum[np.minimum(j0, n - t0)]
    return num.copy(), den


# --------------------------------------------------------------------------
# segment RSS for the mean-shift model: rss[i, j] for y[i..j] inclusive,
# +inf where the segment is shorter than min_len


@njit
def _segment_rss_nb(y, min_len):
    n = y.shape[0]
    out = np.full((n, n), np.inf)
    for i in range(n):
        mean = 0.0
        m2 = 0.0
        for j in range(i, n):
            k = j - i + 1
            d = y[j] - mean
            mean += d / k
            m2 += d * (y[j] - mean)
            if k >= min_len:
                out[i, j] = m2
    return out


def _segment_rss_np(y, min_len):
    y = np.asarray(y, dtype=float)
    n = y.size
    yc = y - y.mean()
    s1 = np.concatenate([[0.0], np.cumsum(yc)])
    s2 = np.concatenate([[0.0], np.cumsum(yc * yc)])
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    length = j - i + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        sums = s1[j + 1] - s1[i]
        rss = (s2[j + 1] - s2[i]) - sums * sums / length
    rss = np.maximum(rss, 0.0)
    return np.where(length >= min_len, rss, np.inf)


# --------------------------------------------------------------------------
# optimal partition: cost[m, j] = min RSS of y[0..j] split into m + 1 segments;
# back[m, j] = last index of segment m (i.e. the m-th break). Ties keep the
# earliest break.


@njit
def _partition_dp_nb(rss, min_len, max_breaks):
    n = rss.shape[0]
    cost = np.full((max_breaks + 1, n), np.inf)
    back = np.full((max_breaks + 1, n), -1, dtype=np.int64)
    for j in range(n):
        cost[0, j] = rss[0, j]
    for m in range(1, max_breaks + 1):
        for j in range((m + 1) * min_len - 1, n):
            best = np.inf
            arg = -1
            for i in range(m * min_len - 1, j - min_len + 1):
                c = cost[m - 1, i] + rss[i + 1, j]
                if c < best:
                    best = c
                    arg = i
            cost[m, j] = best
            back[m, j] = arg
    return cost, back


def _partition_dp_np(rss, min_len, max_breaks):
    n = rss.shape[0]
    cost = np.full((max_breaks + 1, n), np.inf)
    back = np.full((max_breaks + 1, n), -1, dtype=np.int64)
    cost[0] = rss[0]
    for m in range(1, max_breaks + 1):
        lo = m * min_len - 1
        for j in range((m + 1) * min_len - 1, n):
            cand = np.arange(lo, j - min_len + 1)
            vals = cost[m - 1, cand] + rss[cand + 1, j]
            k = int(np.argmin(vals))
            cost[m, j] = vals[k]
            back[m, j] = cand[k]
    return cost, back


if USE_NUMBA:
    airline_residuals = _airline_residuals_nb
    outlier_scan = _outlier_scan_nb
    segment_rss = _segment_rss_nb
    partition_dp = _partition_dp_nb
else:
    airline_residuals = _airline_residuals_np
    outlier_scan = _outlier_scan_np
    segment_rss = _segment_rss_np
    partition_dp = _partition_dp_np

IMPLEMENTATIONS = {
    "airline_residuals": (_airline_residuals_nb, _airline_residuals_np),
    "outlier_scan": (_outlier_scan_nb, _outlier_scan_np),
    "segment_rss": (_segment_rss_nb, _segment_rss_np),
    "partition_dp": (_partition_dp_nb, _partition_dp_np),
}
