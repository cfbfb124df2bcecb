from __future__ import annotations

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from ipseries.core import MonthDate, MonthlySeries
from ipseries.descriptives import decompose_additive, midranks, rank_correlation, summary_stats
from ipseries.errors import DegenerateError, DimensionError, LengthError, ParameterError


def S(values, start=MonthDate(2000, 1)):
    return MonthlySeries(start, np.asarray(values, dtype=float))


finite = st.floats(-1e4, 1e4, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, st.integers(5, 60), elements=finite)
# coarse grid keeps exp and cubic strictly monotone in floating point
grid = st.integers(-50, 50).map(lambda k: k / 10)
tied = arrays(np.float64, st.integers(5, 40), elements=st.integers(-4, 4).map(float))


class TestSummary:
    def test_small(self):
        s = summary_stats(S([1, 2, 3, 4, 5]))
        assert (s.mean, s.median, s.skewness) == (3.0, 3.0, 0.0)
        assert s.sd == pytest.approx(np.sqrt(2.5))

    def test_constant(self):
        with pytest.raises(DegenerateError):
            summary_stats(S([4, 4, 4]))

    def test_too_short(self):
        with pytest.raises(LengthError):
            summary_stats(S([1.0]))

    @given(vectors)
    def test_against_scipy(self, x):
        assume(np.ptp(x) > 1e-3)
        s = summary_stats(S(x))
        q = np.percentile(x, [25, 50, 75], method="linear")
        np.testing.assert_allclose([s.q1, s.median, s.q3], q, rtol=1e-12, atol=1e-9)
        assert s.sd == pytest.approx(np.std(x, ddof=1), rel=1e-9)
        assert s.skewness == pytest.approx(stats.skew(x), rel=1e-6, abs=1e-9)
        assert s.kurtosis == pytest.approx(stats.kurtosis(x, fisher=False), rel=1e-6)

    @given(vectors)
    def test_ordering_and_moment_bound(self, x):
        assume(np.ptp(x) > 1e-3)
        s = summary_stats(S(x))
        assert s.min <= s.q1 <= s.median <= s.q3 <= s.max
        assert s.kurtosis >= s.skewness**2 + 1 - 1e-9

    @given(vectors, st.floats(0.1, 100), st.floats(-100, 100))
    def test_shape_affine_invariance(self, x, a, b):
        assume(np.ptp(x) > 1e-2)
        s0 = summary_stats(S(x))
        s1 = summary_stats(S(a * x + b))
        s2 = summary_stats(S(-x))
        assert s1.skewness == pytest.approx(s0.skewness, abs=1e-6)
        assert s1.kurtosis == pytest.approx(s0.kurtosis, rel=1e-6)
        assert s2.skewness == pytest.approx(-s0.skewness, abs=1e-9)


class TestRankCorrelation:
    def test_reversal(self):
        x = S(np.arange(10.0))
        y = S(np.arange(10.0)[::-1])
        assert rank_correlation(x, y, "spearman") == -1.0
        assert rank_correlation(x, y, "kendall") == -1.0

    @given(tied, st.data())
    def test_against_scipy(self, x, data):
        y = data.draw(arrays(np.float64, x.size, elements=st.integers(-4, 4).map(float)))
        assume(np.ptp(x) > 0 and np.ptp(y) > 0)
        rho = rank_correlation(S(x), S(y), "spearman")
        tau = rank_correlation(S(x), S(y), "kendall")
        assert rho == pytest.approx(stats.spearmanr(x, y)[0], abs=1e-12)
        assert tau == pytest.approx(stats.kendalltau(x, y, variant="b")[0], abs=1e-12)

    @given(vectors)
    @settings(max_examples=50)
    def test_self_and_symmetry(self, x):
        assume(np.ptp(x) > 0)
        y = np.roll(x, 1)
        assume(np.ptp(y) > 0)
        for m in ("spearman", "kendall"):
            assert rank_correlation(S(x), S(x), m) == pytest.approx(1.0)
            assert rank_correlation(S(x), S(y), m) == pytest.approx(rank_correlation(S(y), S(x), m))

    @given(arrays(np.float64, st.integers(5, 40), elements=grid), st.data())
    @settings(max_examples=50)
    def test_monotone_invariance(self, x, data):
        y = data.draw(arrays(np.float64, x.size, elements=grid))
        assume(np.ptp(x) > 0 and np.ptp(y) > 0)
        for m in ("spearman", "kendall"):
            r0 = rank_correlation(S(x), S(y), m)
            r1 = rank_correlation(S(np.exp(x)), S(y**3 + y), m)
            assert r1 == pytest.approx(r0, abs=1e-12)

    def test_midranks(self):
        assert midranks(np.array([3.0, 1.0, 3.0, 2.0])).tolist() == [3.5, 1.0, 3.5, 2.0]

    def test_errors(self):
        with pytest.raises(DegenerateError):
            rank_correlation(S([1, 1, 1]), S([1, 2, 3]))
        with pytest.raises(DimensionError):
            rank_correlation(S([1, 2, 3]), S([1, 2, 3, 4]))
        with pytest.raises(LengthError):
            rank_correlation(S([1, 2]), S([2, 1]))
        with pytest.raises(ParameterError):
            rank_correlation(S([1, 2, 3]), S([1, 2, 3]), "pearson")


class TestDecomposition:
    def test_sawtooth(self):
        x = np.tile(np.arange(12.0), 4)
        d = decompose_additive(S(x))
        ok = ~np.isnan(d.trend)
        np.testing.assert_allclose(d.remainder[ok], 0, atol=1e-9)
        np.testing.assert_allclose(d.trend[ok], x.mean(), atol=1e-9)

    def test_ramp(self):
        d = decompose_additive(S(np.arange(48.0)))
        ok = ~np.isnan(d.trend)
        np.testing.assert_allclose(d.seasonal, 0, atol=1e-9)
        np.testing.assert_allclose(d.remainder[ok], 0, atol=1e-9)

    def test_edges_undefined(self):
        d = decompose_additive(S(np.arange(30.0)))
        assert np.isnan(d.trend[:6]).all() and np.isnan(d.trend[-6:]).all()
        assert not np.isnan(d.trend[6:-6]).any()

    def test_too_short(self):
        with pytest.raises(LengthError):
            decompose_additive(S(np.arange(23.0)))

    def test_march_peak(self, cleaned):
        s = cleaned.trademarks
        d = decompose_additive(s)
        months = [(s.start + k).month for k in range(12)]
        assert months[int(np.argmax(d.figures))] == 3

    def test_trend_oracle(self, rng):
        # direct 2x12 average at one interior point
        x = rng.normal(size=40)
        d = decompose_additive(S(x))
        t = 20
        w = np.r_[0.5, np.ones(11), 0.5] / 12
        assert d.trend[t] == pytest.approx(float(w @ x[t - 6 : t + 7]))

    @given(arrays(np.float64, st.integers(24, 80), elements=finite))
    def test_identities(self, x):
        d = decompose_additive(S(x))
        ok = ~np.isnan(d.trend)
        scale = max(1.0, np.abs(x).max())
        np.testing.assert_allclose((d.trend + d.seasonal + d.remainder)[ok], x[ok],
                                   rtol=1e-9, atol=1e-9 * scale)
        assert abs(d.figures.sum()) <= 1e-9 * scale * 12
        np.testing.assert_array_equal(d.seasonal[12:], d.seasonal[:-12])

    def test_csv(self):
        d = decompose_additive(S(np.arange(24.0), MonthDate(1977, 9)))
        lines = d.to_csv().splitlines()
        assert lines[0] == "date,observed,trend,seasonal,remainder"
        assert lines[1].startswith("1977-09,0.0,,")
