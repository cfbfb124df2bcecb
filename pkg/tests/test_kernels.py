from __future__ import annotations

import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipseries import kernels
from ipseries._accel import HAVE_NUMBA
from ipseries.breaks import date_breakpoints

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def _pair(name):
    return kernels.IMPLEMENTATIONS[name]


@needs_numba
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 120), st.floats(-0.95, 0.95), st.floats(-0.95, 0.95))
def test_airline_parity(seed, n, th, sth):
    z = np.random.default_rng(seed).normal(size=n)
    nb, npy = _pair("airline_residuals")
    np.testing.assert_allclose(nb(z, th, sth), npy(z, th, sth), rtol=1e-9, atol=1e-9)


def test_airline_inverts_ma():
    # filtering an MA sequence built from e recovers e
    rng = np.random.default_rng(1)
    e = rng.normal(size=80)
    th, sth = 0.4, 0.7
    z = e.copy()
    z[1:] -= th * e[:-1]
    z[12:] -= sth * e[:-12]
    z[13:] += th * sth * e[:-13]
    for fn in _pair("airline_residuals"):
        np.testing.assert_allclose(fn(z, th, sth), e, atol=1e-10)


@needs_numba
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 150), st.integers(0, 20))
def test_outlier_scan_parity(seed, n, first):
    rng = np.random.default_rng(seed)
    e = rng.normal(size=n)
    resp = rng.normal(size=n)
    nb, npy = _pair("outlier_scan")
    for a, b in zip(nb(e, resp, first), npy(e, resp, first)):
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9)


def test_outlier_scan_oracle():
    rng = np.random.default_rng(2)
    e, resp = rng.normal(size=30), rng.normal(size=30)
    first = 5
    for fn in _pair("outlier_scan"):
        num, den = fn(e, resp, first)
        for t0 in range(30):
            j = np.arange(max(first - t0, 0), 30 - t0)
            assert num[t0] == pytest.approx(resp[j] @ e[t0 + j], abs=1e-10)
            assert den[t0] == pytest.approx(resp[j] @ resp[j], abs=1e-10)


@pytest.mark.parametrize("impl", [0, 1])
def test_segment_rss_oracle(impl):
    y = np.random.default_rng(3).normal(size=25) * 10 + 1e4
    out = _pair("segment_rss")[impl](y, 3)
    for i in range(25):
        for j in range(25):
            if j - i + 1 >= 3:
                seg = y[i : j + 1]
                assert out[i, j] == pytest.approx(((seg - seg.mean()) ** 2).sum(), rel=1e-8, abs=1e-8)
            else:
                assert out[i, j] == np.inf


@needs_numba
@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(10, 60), st.integers(2, 6))
def test_partition_parity(seed, n, min_len):
    y = np.random.default_rng(seed).normal(size=n)
    if n // min_len < 2:
        return
    rss = kernels._segment_rss_np(y, min_len)
    mb = min(3, n // min_len - 1)
    (c1, b1), (c2, b2) = (fn(rss, min_len, mb) for fn in _pair("partition_dp"))
    np.testing.assert_allclose(c1, c2, rtol=1e-12)
    np.testing.assert_array_equal(b1, b2)


def test_flag_selects_numpy():
    code = ("import json; from ipseries import kernels, _accel;"
            "print(json.dumps([_accel.USE_NUMBA, kernels.segment_rss is kernels._segment_rss_np]))")
    env = dict(os.environ, IPSERIES_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert json.loads(out.stdout) == [False, True]


@needs_numba
def test_fallback_gives_same_breaks():
    code = ("import json; from ipseries.core import load_bundled, to_monthly_series;"
            "from ipseries.breaks import date_breakpoints;"
            "s = to_monthly_series(load_bundled(), 'trademarks');"
            "print(json.dumps(date_breakpoints(s).indices))")
    env = dict(os.environ, IPSERIES_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    from ipseries.core import load_bundled, to_monthly_series

    here = date_breakpoints(to_monthly_series(load_bundled(), "trademarks")).indices
    assert json.loads(out.stdout) == here
