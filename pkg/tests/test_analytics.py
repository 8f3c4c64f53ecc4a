import io
import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from perp_abm.analytics import (
    ShewhartSummary,
    SweepReport,
    aggregate,
    cross_correlation,
    peak_lag,
    read_summary_csv,
    rounding_tolerance,
    shewhart,
    svg_control_chart,
    svg_line_chart,
    write_ccf_csv,
    write_summary_csv,
)


def violations_oracle(x, lcl, ucl, tol=0.0):
    return sum(1 for v in x if v < lcl - tol or v > ucl + tol)


def runs_oracle(x, center, run_length=7, tol=0.0):
    signs = [int(v > center + tol) - int(v < center - tol) for v in x]
    total = 0
    for sign, group in itertools.groupby(signs):
        n = len(list(group))
        if sign != 0 and n >= run_length:
            total += n
    return total


def test_constant_series():
    s = shewhart([4.2] * 50)
    assert s.stddev == 0
    assert s.lcl == s.center == s.ucl == pytest.approx(4.2)
    assert s.violations == 0
    assert s.runs == 0


def test_alternating_series():
    s = shewhart([0.0, 1.0] * 50)
    assert s.center == pytest.approx(0.5)
    assert s.stddev == pytest.approx(1 / 1.128)
    assert s.stddev == pytest.approx(0.8865, abs=1e-4)
    assert s.ucl == pytest.approx(3.159, abs=1e-3)
    assert s.lcl == pytest.approx(0.5 - 3 / 1.128)
    assert s.violations == 0
    assert s.runs == 0


def test_runs_counted():
    # 8 points above, then 3 below, then 7 below
    x = [1.0] * 8 + [-1.0] * 3 + [0.5] + [-1.0] * 7
    s = shewhart(x)
    assert s.runs == runs_oracle(x, s.center)


def test_runs_ignore_points_on_center():
    x = [1.0, 2.0, 3.0] * 5  # mean is exactly 2
    assert shewhart(x).runs == 0
    assert shewhart(np.array(x) + 0.1).runs == 0


def test_violation_counted():
    x = np.zeros(60)
    x[::2] = 0.1
    x[30] = 50.0
    s = shewhart(x)
    assert s.violations == 1


def test_too_short():
    with pytest.raises(ValueError):
        shewhart([1.0])


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
series = arrays(np.float64, st.integers(min_value=2, max_value=120), elements=finite)


@settings(max_examples=200, deadline=None)
@given(series)
def test_counts_match_brute_force(x):
    s = shewhart(x)
    tol = rounding_tolerance(np.asarray(x))
    assert s.violations == violations_oracle(x, s.lcl, s.ucl, tol)
    assert s.runs == runs_oracle(x, s.center, tol=tol)
    assert s.lcl <= s.center <= s.ucl
    assert 0 <= s.violations <= len(x)
    assert 0 <= s.runs <= len(x)


# integer-valued data keeps the shifted/scaled comparisons exact
int_series = arrays(np.float64, st.integers(min_value=2, max_value=80), elements=st.integers(-50, 50).map(float))


@settings(max_examples=150, deadline=None)
@given(int_series, st.integers(-1000, 1000).map(float))
def test_translation_equivariance(x, c):
    a, b = shewhart(x), shewhart(x + c)
    assert b.center == pytest.approx(a.center + c, abs=1e-9)
    assert b.lcl == pytest.approx(a.lcl + c, abs=1e-9)
    assert b.ucl == pytest.approx(a.ucl + c, abs=1e-9)
    assert b.stddev == pytest.approx(a.stddev, abs=1e-9)
    assert (b.violations, b.runs) == (a.violations, a.runs)


@settings(max_examples=150, deadline=None)
@given(int_series, st.sampled_from([0.25, 0.5, 2.0, 4.0, 8.0]))
def test_scale_equivariance(x, s):
    a, b = shewhart(x), shewhart(x * s)
    for name in ("center", "stddev", "lcl", "ucl"):
        assert getattr(b, name) == pytest.approx(getattr(a, name) * s, abs=1e-9)
    assert (b.violations, b.runs) == (a.violations, a.runs)


def test_aggregate():
    s = ShewhartSummary(1.0, 2.0, -5.0, 7.0, 3, 10)
    assert aggregate([s]) == s
    assert aggregate([s] * 100) == s
    two = aggregate([s, ShewhartSummary(3.0, 2.0, -3.0, 9.0, 5, 20)])
    assert two == ShewhartSummary(2.0, 2.0, -4.0, 8.0, 4.0, 15.0)
    with pytest.raises(ValueError):
        aggregate([])


def random_walk(n, seed):
    return np.cumsum(np.random.default_rng(seed).normal(size=n))


def test_ccf_identity_peaks_at_zero():
    a = random_walk(300, 1)
    lags, corr = cross_correlation(a, a, 10)
    assert list(lags) == list(range(-10, 11))
    assert peak_lag(lags, corr) == (0, pytest.approx(1.0))


def test_ccf_detects_shift():
    a = np.random.default_rng(2).normal(size=400)
    b = np.empty_like(a)
    b[2:] = a[:-2]
    b[:2] = 0.0
    lags, corr = cross_correlation(a, b, 6)
    lag, value = peak_lag(lags, corr)
    assert lag == 2
    assert value == pytest.approx(1.0)


def test_ccf_pearson_matches_corrcoef():
    a, b = random_walk(100, 3), random_walk(100, 4)
    lags, corr = cross_correlation(a, b, 5)
    for lag, c in zip(lags, corr):
        x, y = (a[: 100 - lag], b[lag:]) if lag >= 0 else (a[-lag:], b[: 100 + lag])
        assert c == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)


def test_ccf_sample_estimator_matches_statsmodels():
    stattools = pytest.importorskip("statsmodels.tsa.stattools")
    a, b = random_walk(150, 5), random_walk(150, 6)
    lags, corr = cross_correlation(a, b, 8, estimator="sample")
    forward = stattools.ccf(b, a, adjusted=False)
    backward = stattools.ccf(a, b, adjusted=False)
    for lag, c in zip(lags, corr):
        ref = forward[lag] if lag >= 0 else backward[-lag]
        assert c == pytest.approx(ref, abs=1e-12)


def test_ccf_zero_variance_is_nan():
    a = np.ones(20)
    lags, corr = cross_correlation(a, np.arange(20.0), 3)
    assert np.all(np.isnan(corr))
    with pytest.raises(ValueError):
        peak_lag(lags, corr)


def test_ccf_input_checks():
    with pytest.raises(ValueError):
        cross_correlation(np.arange(5.0), np.arange(5.0), 3)
    with pytest.raises(ValueError):
        cross_correlation(np.arange(10.0), np.arange(9.0), 2)
    with pytest.raises(ValueError):
        cross_correlation(np.arange(10.0), np.arange(10.0), 2, estimator="spearman")


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(20, 60), elements=finite))
def test_ccf_self_peak(a):
    assume(np.ptp(a) > 1e-6)
    lags, corr = cross_correlation(a, a, 5)
    assert corr[5] == pytest.approx(1.0)
    assert np.nanmax(corr) <= 1.0 + 1e-9


def test_summary_csv_round_trip():
    s = ShewhartSummary(1.5, 0.25, 0.75, 2.25, 3, 14)
    buf = io.StringIO()
    write_summary_csv(buf, s)
    assert buf.getvalue().splitlines()[0] == "center,stddev,lcl,ucl,violations,runs"
    buf.seek(0)
    assert read_summary_csv(buf) == s


def test_sweep_csv_schema():
    rep = SweepReport("tau", [2, 3], [ShewhartSummary(0, 1, -3, 3, 0, 0), ShewhartSummary(1, 1, -2, 4, 2, 9)])
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "param_value,center,stddev,lcl,ucl,violations,runs"
    assert len(lines) == 3
    np.testing.assert_array_equal(rep.column("runs"), [0, 9])


def test_ccf_csv_blank_for_nan():
    buf = io.StringIO()
    write_ccf_csv(buf, np.array([-1, 0, 1]), np.array([0.5, np.nan, 1.0]))
    assert buf.getvalue().splitlines() == ["lag,correlation", "-1,0.5", "0,", "1,1.0"]


def test_svg_output_is_wellformed():
    import xml.etree.ElementTree as ET

    x = np.array([0.0, 1.0, 50.0, -2.0, 0.5])
    s = shewhart(x)
    root = ET.fromstring(svg_control_chart(x, s))
    assert root.tag.endswith("svg")
    assert len(root.findall("{http://www.w3.org/2000/svg}circle")) == s.violations
    ET.fromstring(svg_line_chart([1, 2, 3], {"a": [1, np.nan, 3], "b": [0, 0, 0]}, hlines={"z": 0}))
