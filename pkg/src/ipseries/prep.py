"""Outlier detection and neighbour-average repair.

Detection is an iterative innovation-outlier search on a fixed seasonal
"airline" model, ARIMA(0,1,1)(0,1,1)[12], fitted by conditional least
squares:

1. difference the working series at lags 1 and 12 and fit the two MA terms;
2. for every month t0 and each outlier type (AO = additive spike,
   LS = level shift) regress the innovations on the type's response
   pattern, giving an effect estimate w and a t-like score
   ``|w| * sqrt(sum r^2) / s``, where ``s`` is a robust local innovation scale
   (1.4826 * MAD over a centred window);
3. take the largest score; if it exceeds ``threshold`` record the month,
   remove its effect from the working copy and repeat.

The neighbours of a recorded month cannot be flagged themselves: they anchor
the repair value. Flags are then repaired pointwise regardless of type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .core import MonthDate, MonthlySeries
from .errors import (
    AmbiguityError,
    DegenerateError,
    DimensionError,
    LengthError,
    UnsupportedPositionError,
)

DEFAULT_THRESHOLD = 4.8
DEFAULT_SCALE_WINDOW = 84
MIN_LENGTH = 25
_LOST = 13  # observations consumed by the (1 - B)(1 - B^12) difference
_MAD_SCALE = 1.4826


@dataclass(frozen=True)
class OutlierFlag:
    index: int
    date: MonthDate
    observed: float
    score: float
    kind: str

    def to_dict(self) -> dict:
        return {
            "date": str(self.date),
            "index": self.index,
            "kind": self.kind,
            "observed": self.observed,
            "score": round(self.score, 6),
        }


@dataclass(frozen=True)
class OutlierReport:
    flags: tuple[OutlierFlag, ...] = ()
    threshold: float = DEFAULT_THRESHOLD

    def __len__(self) -> int:
        return len(self.flags)

    @property
    def indices(self) -> list[int]:
        return [f.index for f in self.flags]

    @property
    def dates(self) -> list[MonthDate]:
        return [f.date for f in self.flags]

    def to_list(self) -> list[dict]:
        return [f.to_dict() for f in self.flags]

    def to_json(self) -> str:
        return json.dumps(self.to_list(), sort_keys=True)


@dataclass(frozen=True)
class CleanedPair:
    trademarks: MonthlySeries
    patents: MonthlySeries
    reports: tuple[OutlierReport, OutlierReport]


def _seasonal_difference(x: np.ndarray) -> np.ndarray:
    return x[13:] - x[12:-1] - x[1:-12] + x[:-13]


def fit_airline(z: np.ndarray) -> tuple[float, float]:
    """Conditional-least-squares MA coefficients (theta, Theta) for ``z``.

    Parameters are mapped through tanh so the fit stays invertible.
    """

    def css(p):
        th, sth = np.tanh(p)
        e = kernels.airline_residuals(z, th, sth)
        return float(e @ e)

    res = minimize(css, x0=np.array([0.3, 0.3]), method="Nelder-Mead",
                   options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 2000})
    th, sth = np.tanh(res.x)
    return float(th), float(sth)


def _response(theta: float, seasonal_theta: float, n: int) -> dict[str, np.ndarray]:
    impulse = np.zeros(n)
    impulse[0] = 1.0
    impulse[1] -= 1.0
    if n > 12:
        impulse[12] -= 1.0
    if n > 13:
        impulse[13] += 1.0
    pi = kernels.airline_residuals(impulse, theta, seasonal_theta)
    return {"AO": pi, "LS": np.cumsum(pi)}


def _local_scale(e: np.ndarray, half: int) -> np.ndarray:
    n = e.size
    out = np.empty(n)
    for t in range(n):
        w = e[max(0, t - half) : t + half + 1]
        out[t] = _MAD_SCALE * np.median(np.abs(w - np.median(w)))
    return out


def outlier_scores(x: np.ndarray, scale_window: int = DEFAULT_SCALE_WINDOW):
    """One scan of the search: scores and effect sizes per type.

    Returns ``{kind: (score, effect)}`` with arrays indexed by month; months
    0 and n-1 get score 0.
    """
    n = x.size
    z = _seasonal_difference(x)
    theta, seasonal_theta = fit_airline(z)
    e = np.concatenate([np.zeros(_LOST), kernels.airline_residuals(z, theta, seasonal_theta)])
    scale = _local_scale(e[_LOST:], scale_window)
    if np.any(scale <= 0):
        raise DegenerateError("innovation MAD is zero; cannot score outliers")
    scale_at = scale[np.maximum(np.arange(n), _LOST) - _LOST]
    out = {}
    for kind, resp in _response(theta, seasonal_theta, n).items():
        num, den = kernels.outlier_scan(e, resp, _LOST)
        with np.errstate(divide="ignore", invalid="ignore"):
            effect = np.where(den > 0, num / den, 0.0)
            score = np.abs(effect) * np.sqrt(den) / scale_at
        score[0] = score[-1] = 0.0
        out[kind] = (np.nan_to_num(score), effect)
    return out


def detect_outliers(
    series: MonthlySeries,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    scale_window: int = DEFAULT_SCALE_WINDOW,
    max_iter: int = 20,
) -> OutlierReport:
    """Flag anomalous months by the iterative search described above.

    Parameters
    ----------
    series : MonthlySeries
        At least 25 observations.
    threshold : float
        Minimum score for a flag.
    scale_window : int
        Half-width (months) of the window for the local innovation scale.
    max_iter : int
        Cap on the number of flags.

    Raises
    ------
    LengthError
        Series shorter than 25 months.
    DegenerateError
        The innovations have zero robust dispersion.
    """
    n = len(series)
    if n < MIN_LENGTH:
        raise LengthError(f"outlier detection needs >= {MIN_LENGTH} observations, got {n}")
    x = series.values.copy()
    banned = np.zeros(n, dtype=bool)
    found: list[OutlierFlag] = []
    for _ in range(max_iter):
        scores = outlier_scores(x, scale_window)
        best = None
        for kind, (score, effect) in scores.items():
            s = np.where(banned, 0.0, score)
            t0 = int(np.argmax(s))
            if best is None or s[t0] > best[2]:
                best = (t0, kind, float(s[t0]), float(effect[t0]))
        t0, kind, score, effect = best
        if score <= threshold:
            break
        found.append(OutlierFlag(t0, series.date_at(t0), float(series.values[t0]), score, kind))
        banned[max(t0 - 1, 0) : t0 + 2] = True
        if kind == "AO":
            x[t0] -= effect
        else:
            x[t0:] -= effect
    found.sort(key=lambda f: f.index)
    return OutlierReport(tuple(found), threshold)


def replace_outliers(series: MonthlySeries, report: OutlierReport) -> MonthlySeries:
    """Replace each flagged value by the mean of its two original neighbours."""
    idx = sorted(report.indices)
    n = len(series)
    for i in idx:
        if i <= 0 or i >= n - 1:
            raise UnsupportedPositionError(f"index {i} has fewer than two neighbours")
    for a, b in zip(idx, idx[1:]):
        if b - a <= 1:
            raise AmbiguityError(f"flags at {a} and {b} are adjacent")
    orig = series.values
    out = orig.copy()
    for i in idx:
        out[i] = (orig[i - 1] + orig[i + 1]) / 2.0
    return series.replace_values(out)


def clean_pair(
    trademarks: MonthlySeries,
    patents: MonthlySeries,
    threshold: float = DEFAULT_THRESHOLD,
) -> CleanedPair:
    if len(trademarks) != len(patents):
        raise DimensionError("trademark and patent series differ in length")
    rt = detect_outliers(trademarks, threshold)
    rp = detect_outliers(patents, threshold)
    return CleanedPair(replace_outliers(trademarks, rt), replace_outliers(patents, rp), (rt, rp))
