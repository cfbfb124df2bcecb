"""Embedded critical-value tables and interpolation helpers."""

from __future__ import annotations

import numpy as np

# sup_t |B(t + h) - B(t)| quantiles; rows follow MOSUM_BANDWIDTHS, columns
# MOSUM_LEVELS. Generated by scripts/mosum_tables.py (40000 paths, 4000 steps,
# seed 20201). Bridge increments drive OLS-MOSUM, motion increments Rec-MOSUM.
MOSUM_BANDWIDTHS = np.round(np.arange(1, 11) * 0.05, 2)
MOSUM_LEVELS = (0.2, 0.15, 0.1, 0.05, 0.025, 0.01)

MOSUM_BRIDGE = np.array([
    (0.7070, 0.7294, 0.7602, 0.8050, 0.8469, 0.9008),  # h=0.05
    (0.9059, 0.9407, 0.9853, 1.0506, 1.1116, 1.1894),  # h=0.10
    (1.0275, 1.0704, 1.1247, 1.2122, 1.2893, 1.3848),  # h=0.15
    (1.1060, 1.1549, 1.2231, 1.3194, 1.4112, 1.5223),  # h=0.20
    (1.1560, 1.2129, 1.2861, 1.3994, 1.4972, 1.6166),  # h=0.25
    (1.1864, 1.2476, 1.3279, 1.4492, 1.5534, 1.6874),  # h=0.30
    (1.2069, 1.2707, 1.3530, 1.4794, 1.5982, 1.7311),  # h=0.35
    (1.2100, 1.2765, 1.3647, 1.4953, 1.6097, 1.7573),  # h=0.40
    (1.2082, 1.2742, 1.3612, 1.4979, 1.6177, 1.7652),  # h=0.45
    (1.2013, 1.2700, 1.3579, 1.4954, 1.6124, 1.7644),  # h=0.50
])

MOSUM_MOTION = np.array([
    (0.7240, 0.7462, 0.7747, 0.8236, 0.8670, 0.9173),  # h=0.05
    (0.9487, 0.9844, 1.0303, 1.1025, 1.1708, 1.2507),  # h=0.10
    (1.1005, 1.1473, 1.2095, 1.3027, 1.3849, 1.4850),  # h=0.15
    (1.2146, 1.2693, 1.3434, 1.4542, 1.5548, 1.6723),  # h=0.20
    (1.3048, 1.3680, 1.4532, 1.5864, 1.7044, 1.8341),  # h=0.25
    (1.3783, 1.4493, 1.5440, 1.6880, 1.8151, 1.9703),  # h=0.30
    (1.4391, 1.5211, 1.6244, 1.7853, 1.9210, 2.0984),  # h=0.35
    (1.4883, 1.5762, 1.6876, 1.8577, 2.0138, 2.2031),  # h=0.40
    (1.5266, 1.6212, 1.7452, 1.9299, 2.1007, 2.3037),  # h=0.45
    (1.5582, 1.6584, 1.7904, 1.9963, 2.1762, 2.3953),  # h=0.50
])

# Dickey-Fuller t distribution, constant but no trend in the test regression.
# Rows: sample size; columns: DF_PROBS.
DF_SIZES = np.array([25, 50, 100, 250, 500, 100000])
DF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
DF_CONST = np.array([
    (-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72),
    (-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66),
    (-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63),
    (-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62),
    (-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61),
    (-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60),
])

# KPSS level-stationarity upper-tail critical values.
KPSS_LEVELS = np.array([0.10, 0.05, 0.025, 0.01])
KPSS_LEVEL_CRIT = np.array([0.347, 0.463, 0.574, 0.739])

# Johansen trace test, two variables; keyed by ecdet then rank hypothesis r.
JOHANSEN_LEVELS = (0.10, 0.05, 0.01)
JOHANSEN_TRACE = {
    "const": {1: (7.52, 9.24, 12.97), 0: (17.85, 19.96, 24.60)},
    "none": {1: (6.50, 8.18, 11.65), 0: (15.66, 17.95, 23.52)},
}

# Phillips-Ouliaris Pz, two variables, keyed by demeaning.
PO_LEVELS = (0.10, 0.05, 0.01)
PO_PZ = {
    "none": (33.9267, 40.8217, 55.1911),
    "const": (47.5877, 55.2202, 71.9273),
}


def mosum_critical_values(h: float, recursive: bool) -> np.ndarray:
    """Critical values at MOSUM_LEVELS for bandwidth ``h``.

    Bandwidths between grid points are interpolated linearly; outside
    [0.05, 0.5] the nearest row is used, which is only a rough guide.
    """
    table = MOSUM_MOTION if recursive else MOSUM_BRIDGE
    return np.array([np.interp(h, MOSUM_BANDWIDTHS, table[:, j]) for j in range(table.shape[1])])


def mosum_pvalue(stat: float, h: float, recursive: bool) -> tuple[float, bool]:
    """Interpolated p-value and whether it sits at the table floor (0.01)."""
    crit = mosum_critical_values(h, recursive)
    xs = np.concatenate([[0.0], crit])
    ps = np.concatenate([[1.0], MOSUM_LEVELS])
    if stat >= crit[-1]:
        return MOSUM_LEVELS[-1], True
    return float(np.interp(stat, xs, ps)), False


def df_quantiles(nobs: int) -> np.ndarray:
    """Dickey-Fuller quantile row interpolated to ``nobs``."""
    return np.array([np.interp(nobs, DF_SIZES, DF_CONST[:, j]) for j in range(DF_PROBS.size)])


def df_pvalue(stat: float, nobs: int) -> tuple[float, bool]:
    """Lower-tail p-value clamped to [0.01, 0.99]; flag marks clamping."""
    q = df_quantiles(nobs)
    if stat <= q[0]:
        return float(DF_PROBS[0]), True
    if stat >= q[-1]:
        return float(DF_PROBS[-1]), True
    return float(np.interp(stat, q, DF_PROBS)), False


def kpss_pvalue(stat: float) -> tuple[float, bool]:
    """Upper-tail p-value clamped to [0.01, 0.10]; flag marks clamping."""
    if stat <= KPSS_LEVEL_CRIT[0]:
        return float(KPSS_LEVELS[0]), True
    if stat >= KPSS_LEVEL_CRIT[-1]:
        return float(KPSS_LEVELS[-1]), True
    return float(np.interp(stat, KPSS_LEVEL_CRIT, KPSS_LEVELS)), False
