"""Stationarity testing and two-variable cointegration.

All long-run variances use the Bartlett kernel with the short lag rule
``l = floor(4 (n / 100) ** 0.25)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import tables
from .errors import DegenerateError, DimensionError, LengthError, ParameterError, RankError

TESTS = ("kpss", "adf", "pp")


def short_lag(n: int) -> int:
    return int(math.floor(4 * (n / 100) ** 0.25))


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=float)


def _is_constant(x: np.ndarray) -> bool:
    return bool(np.all(x == x[0]))


def bartlett_lrv(e: np.ndarray, lags: int) -> float:
    """Newey-West long-run variance of a (mean zero) residual vector."""
    n = e.size
    s = float(e @ e) / n
    for j in range(1, lags + 1):
        s += 2.0 * (1.0 - j / (lags + 1.0)) * float(e[j:] @ e[:-j]) / n
    return s


def _ols(y: np.ndarray, X: np.ndarray):
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DegenerateError("regressors are collinear")
    resid = y - X @ beta
    return beta, resid


@dataclass(frozen=True)
class UnitRootResult:
    """Result of one unit-root or stationarity test.

    ``reject`` refers to that test's own null: stationarity for KPSS and a
    unit root for ADF and PP.
    """

    test: str
    statistic: float
    p_value: float
    reject: bool
    lags: int
    p_clamped: bool = False
    alpha: float = 0.05

    @property
    def stationary(self) -> bool:
        return (not self.reject) if self.test == "kpss" else self.reject

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "lags": self.lags,
            "p_clamped": self.p_clamped,
            "p_value": self.p_value,
            "reject": self.reject,
            "statistic": self.statistic,
            "test": self.test,
        }


def kpss_test(series, lags: int | None = None, alpha: float = 0.05) -> UnitRootResult:
    """KPSS test of level stationarity.

    Rejection compares against the tabulated critical value at ``alpha``
    (interpolated between 10%, 5%, 2.5% and 1%).
    """
    y = _values(series)
    n = y.size
    if n < 12:
        raise LengthError("KPSS needs at least 12 observations")
    e = y - y.mean()
    if not np.any(e):
        raise DegenerateError("zero variance: KPSS statistic undefined")
    lags = short_lag(n) if lags is None else lags
    s = np.cumsum(e)
    stat = float(s @ s) / (n * n * bartlett_lrv(e, lags))
    p, clamped = tables.kpss_pvalue(stat)
    crit = float(np.interp(alpha, tables.KPSS_LEVELS[::-1], tables.KPSS_LEVEL_CRIT[::-1]))
    return UnitRootResult("kpss", stat, p, stat > crit, lags, clamped, alpha)


def _df_crit(nobs: int, alpha: float) -> float:
    return float(np.interp(alpha, tables.DF_PROBS, tables.df_quantiles(nobs)))


def adf_test(series, lags: int | None = None, alpha: float = 0.05) -> UnitRootResult:
    """Augmented Dickey-Fuller t-test with a constant.

    Regresses dy_t on (1, y_{t-1}, dy_{t-1}, ..., dy_{t-k}) with
    ``k = floor((n - 1) ** (1/3))`` by default.
    """
    y = _values(series)
    n = y.size
    k = int(math.floor((n - 1) ** (1.0 / 3.0))) if lags is None else lags
    dy = np.diff(y)
    nobs = dy.size - k
    if nobs < k + 3:
        raise LengthError(f"ADF with {k} lags needs more than {n} observations")
    cols = [np.ones(nobs), y[k:-1]]
    cols += [dy[k - j : dy.size - j] for j in range(1, k + 1)]
    X = np.column_stack(cols)
    target = dy[k:]
    beta, resid = _ols(target, X)
    dof = nobs - X.shape[1]
    s2 = float(resid @ resid) / dof
    if s2 == 0.0:
        raise DegenerateError("perfect fit: ADF statistic undefined")
    cov = s2 * np.linalg.inv(X.T @ X)
    stat = float(beta[1] / math.sqrt(cov[1, 1]))
    p, clamped = tables.df_pvalue(stat, nobs)
    return UnitRootResult("adf", stat, p, stat < _df_crit(nobs, alpha), k, clamped, alpha)


def pp_test(series, lags: int | None = None, alpha: float = 0.05) -> UnitRootResult:
    """Phillips-Perron Z-tau test with a constant."""
    y = _values(series)
    if y.size < 8:
        raise LengthError("PP needs at least 8 observations")
    target = y[1:]
    lagged = y[:-1]
    n = target.size
    X = np.column_stack([np.ones(n), lagged])
    beta, resid = _ols(target, X)
    ssr = float(resid @ resid)
    if ssr == 0.0:
        raise DegenerateError("perfect fit: PP statistic undefined")
    l = short_lag(n) if lags is None else lags  # noqa: E741
    s2 = ssr / (n - 2)
    se = math.sqrt(s2 * np.linalg.inv(X.T @ X)[1, 1])
    tstat = (beta[1] - 1.0) / se
    gamma0 = ssr / n
    lam2 = bartlett_lrv(resid, l)
    lam = math.sqrt(lam2)
    stat = math.sqrt(gamma0 / lam2) * tstat - (lam2 - gamma0) / (2.0 * lam) * n * se / math.sqrt(s2)
    p, clamped = tables.df_pvalue(stat, n)
    return UnitRootResult("pp", stat, p, stat < _df_crit(n, alpha), l, clamped, alpha)


_RUNNERS = {"kpss": kpss_test, "adf": adf_test, "pp": pp_test}


@dataclass(frozen=True)
class NdiffsResult:
    test: str
    d: int
    capped: bool = False


def ndiffs(series, test: str = "kpss", alpha: float = 0.05, max_d: int = 2) -> NdiffsResult:
    """Smallest number of differences after which ``test`` indicates stationarity.

    A series that is (or becomes) constant counts as stationary. If the
    series still fails after ``max_d`` differences the result is ``max_d`` with
    ``capped`` set.
    """
    if test not in _RUNNERS:
        raise ParameterError(f"unknown test {test!r}; expected one of {TESTS}")
    run = _RUNNERS[test]
    x = _values(series)
    d = 0
    if _is_constant(x):
        return NdiffsResult(test, 0)
    needs = not run(x, alpha=alpha).stationary
    while needs and d < max_d:
        d += 1
        x = np.diff(x)
        if _is_constant(x):
            return NdiffsResult(test, d)
        needs = not run(x, alpha=alpha).stationary
    return NdiffsResult(test, d, capped=needs)


@dataclass(frozen=True)
class IntegrationOrder:
    d: int
    per_test: dict = field(default_factory=dict)
    capped: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"capped": dict(self.capped), "d": self.d, "per_test": dict(self.per_test)}


def integration_order(series, tests=TESTS, alpha: float = 0.05) -> IntegrationOrder:
    res = {t: ndiffs(series, t, alpha) for t in tests}
    return IntegrationOrder(max(r.d for r in res.values()),
                            {t: r.d for t, r in res.items()},
                            {t: r.capped for t, r in res.items()})


# --------------------------------------------------------------------------
# cointegration


def _pair(x, y) -> np.ndarray:
    a = _values(x)
    b = _values(y)
    if a.size != b.size:
        raise DimensionError(f"lengths differ: {a.size} vs {b.size}")
    return np.column_stack([a, b])


@dataclass(frozen=True)
class JohansenResult:
    eigenvalues: tuple[float, ...]
    trace: dict
    critical_values: dict
    lags: int
    ecdet: str
    nobs: int

    def level_exceeded(self, r: int) -> float | None:
        """Smallest tabulated level whose critical value the statistic exceeds."""
        for lvl, cv in sorted(zip(tables.JOHANSEN_LEVELS, self.critical_values[r])):
            if self.trace[r] > cv:
                return lvl
        return None

    def to_dict(self) -> dict:
        return {
            "critical_values": {str(r): list(v) for r, v in self.critical_values.items()},
            "ecdet": self.ecdet,
            "eigenvalues": list(self.eigenvalues),
            "lags": self.lags,
            "levels": list(tables.JOHANSEN_LEVELS),
            "nobs": self.nobs,
            "trace": {str(r): v for r, v in self.trace.items()},
        }


def johansen_trace(x, y, K: int = 2, ecdet: str = "const") -> JohansenResult:
    """Johansen trace test for a two-variable VECM with K lags in levels.

    ``ecdet="const"`` restricts the constant to the cointegrating space;
    ``"none"`` leaves an unrestricted constant in the short-run part.
    """
    if K < 2:
        raise ParameterError("K must be >= 2")
    if ecdet not in tables.JOHANSEN_TRACE:
        raise ParameterError(f"ecdet must be one of {tuple(tables.JOHANSEN_TRACE)}")
    z = _pair(x, y)
    N, P = z.shape
    if N < 5 * K:
        raise LengthError(f"need at least {5 * K} observations for K={K}")
    dz = np.diff(z, axis=0)
    T = N - K
    Z0 = dz[K - 1 :]
    Z1 = np.column_stack([dz[K - 1 - j : dz.shape[0] - j] for j in range(1, K)])
    ZK = z[: N - K]
    if ecdet == "const":
        ZK = np.column_stack([ZK, np.ones(T)])
    else:
        Z1 = np.column_stack([np.ones(T), Z1])

    def resid(A):
        coef, *_ = np.linalg.lstsq(Z1, A, rcond=None)
        return A - Z1 @ coef

    R0, RK = resid(Z0), resid(ZK)
    S00 = R0.T @ R0 / T
    S0K = R0.T @ RK / T
    SKK = RK.T @ RK / T
    try:
        lhs = S0K.T @ np.linalg.solve(S00, S0K)
        lam = linalg.eigh(lhs, SKK, eigvals_only=True)
    except (np.linalg.LinAlgError, linalg.LinAlgError) as exc:
        raise RankError(f"singular moment matrix: {exc}") from None
    lam = np.clip(np.sort(lam)[::-1][:P], 0.0, 1.0 - 1e-15)
    trace = {r: float(-T * np.sum(np.log1p(-lam[r:]))) for r in range(P)}
    crit = {r: tuple(tables.JOHANSEN_TRACE[ecdet][r]) for r in range(P)}
    return JohansenResult(tuple(float(v) for v in lam), trace, crit, K, ecdet, T)


@dataclass(frozen=True)
class PoResult:
    statistic: float
    critical_values: tuple[float, float, float]
    demean: str
    lags: int

    def level_exceeded(self) -> float | None:
        for lvl, cv in sorted(zip(tables.PO_LEVELS, self.critical_values)):
            if self.statistic > cv:
                return lvl
        return None

    def to_dict(self) -> dict:
        return {
            "critical_values": list(self.critical_values),
            "demean": self.demean,
            "lags": self.lags,
            "levels": list(tables.PO_LEVELS),
            "statistic": self.statistic,
        }


def phillips_ouliaris_pz(x, y, demean: str = "none", lags: int | None = None) -> PoResult:
    """Phillips-Ouliaris Pz statistic for the null of no cointegration.

    ``Pz = T tr(Omega M_zz^-1)`` with ``M_zz`` the second-moment matrix of the
    levels and ``Omega`` the Bartlett long-run covariance of the residuals
    of a first-order VAR in levels.
    """
    if demean not in tables.PO_PZ:
        raise ParameterError(f"demean must be one of {tuple(tables.PO_PZ)}")
    z = _pair(x, y)
    N = z.shape[0]
    if N < 10:
        raise LengthError("Pz needs at least 10 observations")
    if demean == "const":
        z = z - z.mean(axis=0)
    T = N - 1
    lags = short_lag(T) if lags is None else lags
    lhs, rhs = z[1:], z[:-1]
    coef, *_ = np.linalg.lstsq(rhs, lhs, rcond=None)
    u = lhs - rhs @ coef
    omega = u.T @ u / T
    for j in range(1, lags + 1):
        g = u[j:].T @ u[:-j] / T
        omega += (1.0 - j / (lags + 1.0)) * (g + g.T)
    mzz = z[1:].T @ z[1:] / T
    try:
        stat = float(T * np.trace(omega @ np.linalg.inv(mzz)))
    except np.linalg.LinAlgError:
        raise RankError("singular second-moment matrix") from None
    if np.linalg.cond(mzz) > 1e12:
        raise RankError("second-moment matrix is numerically singular")
    return PoResult(stat, tuple(tables.PO_PZ[demean]), demean, lags)
