"""Morlet continuous wavelet transform and cross-wavelet spectrum.

Both inputs are standardised and zero padded, then transformed scale by
scale in the frequency domain. Cross
power is reported as ``|W_x conj(W_y)|`` and is tested against the product of
two AR(1) red-noise spectra.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import k1

from .core import MonthlySeries
from .errors import DegenerateError, DimensionError, LengthError, ParameterError

MIN_LENGTH = 8


@dataclass(frozen=True)
class WaveletParams:
    """Transform settings. ``J=None`` picks ``floor(log2(n dt / s0) / dj)``."""

    omega0: float = 6.0
    dt: float = 1.0
    dj: float = 1.0 / 12.0
    s0: float = 2.0
    J: int | None = None

    def __post_init__(self) -> None:
        if self.omega0 < 5:
            raise ParameterError("omega0 must be >= 5")
        if self.s0 <= 0 or self.dj <= 0 or self.dt <= 0:
            raise ParameterError("s0, dj and dt must be positive")
        if self.J is not None and self.J < 1:
            raise ParameterError("J must be >= 1")

    @property
    def fourier_factor(self) -> float:
        return 4.0 * math.pi / (self.omega0 + math.sqrt(2.0 + self.omega0**2))

    def n_scales(self, n: int) -> int:
        if self.J is not None:
            return self.J
        return max(1, int(math.floor(math.log2(n * self.dt / self.s0) / self.dj)))

    def scales(self, n: int) -> np.ndarray:
        return self.s0 * 2.0 ** (np.arange(self.n_scales(n) + 1) * self.dj)


@dataclass(frozen=True)
class CrossWaveletSpectrum:
    scales: np.ndarray
    periods: np.ndarray
    power: np.ndarray
    phase: np.ndarray
    signif: np.ndarray
    coi: np.ndarray
    ar1: tuple[float, float]
    threshold: np.ndarray
    alpha: float = 0.05

    def inside_coi(self) -> np.ndarray:
        """Boolean mask of cells unaffected by edge effects."""
        return self.periods[:, None] <= self.coi[None, :]

    def to_dict(self, digits: int = 6) -> dict:
        r = lambda a: np.round(np.asarray(a, dtype=float), digits).tolist()  # noqa: E731
        return {
            "alpha": self.alpha,
            "ar1": [round(v, digits) for v in self.ar1],
            "coi": r(self.coi),
            "periods": r(self.periods),
            "phase": r(self.phase),
            "power": r(self.power),
            "scales": r(self.scales),
            "signif": self.signif.astype(int).tolist(),
            "threshold": r(self.threshold),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["scale", "time", "power", "phase", "signif"])
        for j, s in enumerate(self.scales):
            for t in range(self.power.shape[1]):
                w.writerow([f"{s:.6g}", t, f"{self.power[j, t]:.6g}",
                            f"{self.phase[j, t]:.6g}", int(self.signif[j, t])])
        return buf.getvalue()


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=float)


def _pad_length(n: int) -> int:
    # at least one full extra power of two so the circular wrap stays far out
    base2 = int(math.floor(math.log2(n) + 0.4999))
    return 2 ** (base2 + 1)


def morlet_cwt(series, params: WaveletParams | None = None) -> np.ndarray:
    """Complex transform of the standardised series, shape ``(J + 1, n)``.

    Raises
    ------
    LengthError
        Fewer than 8 observations.
    """
    p = params or WaveletParams()
    x = _values(series)
    n = x.size
    if n < MIN_LENGTH:
        raise LengthError(f"wavelet transform needs >= {MIN_LENGTH} observations, got {n}")
    scales = p.scales(n)
    x = x - x.mean()
    sd = x.std()
    if sd == 0.0:
        return np.zeros((scales.size, n), dtype=complex)
    x = x / sd
    npad = _pad_length(n)
    xhat = np.fft.fft(np.concatenate([x, np.zeros(npad - n)]))
    k = np.arange(1, npad // 2 + 1) * (2.0 * math.pi / (npad * p.dt))
    omega = np.concatenate([[0.0], k, -k[: (npad - 1) // 2][::-1]])
    arg = scales[:, None] * omega[None, :]
    daughter = np.where(omega > 0,
                        math.pi**-0.25 * np.exp(-0.5 * (arg - p.omega0) ** 2),
                        0.0)
    daughter *= np.sqrt(2.0 * math.pi * scales[:, None] / p.dt)
    return np.fft.ifft(xhat[None, :] * daughter, axis=1)[:, :n]


def ar1_fit(series) -> float:
    """Lag-1 autocorrelation of the demeaned series."""
    x = _values(series)
    if x.size < 3:
        raise LengthError("AR(1) fit needs at least 3 observations")
    d = x - x.mean()
    den = float(d @ d)
    if den == 0.0:
        raise DegenerateError("zero variance: AR(1) coefficient undefined")
    return float(d[:-1] @ d[1:] / den)


def ar1_spectrum(phi: float, period, dt: float = 1.0):
    """Normalised AR(1) spectrum at the given Fourier period(s)."""
    if abs(phi) >= 1:
        raise ParameterError(f"AR(1) coefficient must satisfy |phi| < 1, got {phi}")
    period = np.asarray(period, dtype=float)
    return (1 - phi**2) / (1 + phi**2 - 2 * phi * np.cos(2 * math.pi * dt / period))


def product_quantile(alpha: float) -> float:
    """Upper-alpha point of sqrt(E1 E2) for independent unit exponentials.

    Each standardised wavelet power is chi2(2)/2 under the red-noise null, and
    P(sqrt(E1 E2) > c) = 2c K1(2c).
    """
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0, 1)")
    return brentq(lambda c: 2 * c * k1(2 * c) - alpha, 1e-9, 50.0, xtol=1e-12)


def significance_threshold(phi_x: float, phi_y: float, period, alpha: float = 0.05,
                           dt: float = 1.0):
    """Cross-power level exceeded with probability ``alpha`` under red noise."""
    return product_quantile(alpha) * np.sqrt(ar1_spectrum(phi_x, period, dt)
                                             * ar1_spectrum(phi_y, period, dt))


def cone_of_influence(n: int, dt: float = 1.0, omega0: float = 6.0) -> np.ndarray:
    """Largest reliable Fourier period at each time step.

    The Morlet e-folding time is sqrt(2) s, so an edge at distance d spoils
    scales above d / sqrt(2).
    """
    ff = 4.0 * math.pi / (omega0 + math.sqrt(2.0 + omega0**2))
    t = np.arange(n)
    return ff / math.sqrt(2.0) * dt * np.minimum(t + 0.5, n - t - 0.5)


def cross_wavelet(x, y, params: WaveletParams | None = None,
                  alpha: float = 0.05) -> CrossWaveletSpectrum:
    """Cross-wavelet spectrum of two series, tested against red noise."""
    p = params or WaveletParams()
    a = _values(x)
    b = _values(y)
    if a.size != b.size:
        raise DimensionError(f"lengths differ: {a.size} vs {b.size}")
    wx = morlet_cwt(a, p)
    wy = morlet_cwt(b, p)
    wxy = wx * np.conj(wy)
    power = np.abs(wxy)
    phase = np.angle(wxy)
    phase[phase <= -math.pi] = math.pi
    scales = p.scales(a.size)
    periods = scales * p.fourier_factor
    phis = (ar1_fit(a), ar1_fit(b))
    thr = significance_threshold(phis[0], phis[1], periods, alpha, p.dt)
    return CrossWaveletSpectrum(
        scales=scales,
        periods=periods,
        power=power,
        phase=phase,
        signif=power > thr[:, None],
        coi=cone_of_influence(a.size, p.dt, p.omega0),
        ar1=phis,
        threshold=thr,
        alpha=alpha,
    )
