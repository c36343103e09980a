import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmee_granger.exceptions import LengthMismatchError, NonFiniteError, OrderTooLargeError
from qmee_granger.timeseries import TimeSeries, build_ar_design, build_var_design


def test_ar_design_order_one():
    d = build_ar_design(TimeSeries([1, 2, 3, 4]), 1)
    np.testing.assert_array_equal(d.regressors, [[1], [2], [3]])
    np.testing.assert_array_equal(d.targets, [2, 3, 4])


def test_ar_design_order_two():
    d = build_ar_design(TimeSeries([1, 2, 3, 4, 5]), 2)
    np.testing.assert_array_equal(d.regressors, [[2, 1], [3, 2], [4, 3]])
    np.testing.assert_array_equal(d.targets, [3, 4, 5])


def test_var_design_order_one():
    d = build_var_design(TimeSeries([1, 2, 3]), TimeSeries([4, 5, 6]), 1)
    np.testing.assert_array_equal(d.regressors, [[1, 4], [2, 5]])
    np.testing.assert_array_equal(d.targets, [2, 3])


def test_var_design_identical_inputs_duplicates_columns():
    x = TimeSeries(np.random.default_rng(0).normal(size=50))
    d = build_var_design(x, x, 1)
    np.testing.assert_array_equal(d.regressors[:, 0], d.regressors[:, 1])


def _index_oracle(n, p, channels):
    # rows: t = p+1..N (1-based) -> N - p rows; one column per lag per channel
    return sum(1 for _ in range(p + 1, n + 1)), p * channels


def test_design_sizes_match_index_arithmetic():
    rng = np.random.default_rng(1)
    x, y = TimeSeries(rng.normal(size=500)), TimeSeries(rng.normal(size=500))
    ar = build_ar_design(x, 10)
    assert (ar.rows, ar.d) == _index_oracle(500, 10, 1) == (490, 10)
    var = build_var_design(y, x, 10)
    assert (var.rows, var.d) == _index_oracle(500, 10, 2) == (490, 20)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(8, 60), p=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_rows_read_back_from_series(n, p, seed):
    p = min(p, n // 3)
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=n), rng.normal(size=n)
    var = build_var_design(TimeSeries(y), TimeSeries(x), p)
    for r in range(var.rows):
        t = r + p  # 0-based time index of the target
        assert var.targets[r] == y[t]
        for j in range(1, p + 1):
            assert var.regressors[r, j - 1] == y[t - j]
            assert var.regressors[r, p + j - 1] == x[t - j]
    ar = build_ar_design(TimeSeries(y), p)
    np.testing.assert_array_equal(var.regressors[:, :p], ar.regressors)
    np.testing.assert_array_equal(var.targets, ar.targets)


def test_errors():
    with pytest.raises(OrderTooLargeError):
        build_ar_design(TimeSeries([1.0, 2.0, 3.0, 4.0]), 2)
    with pytest.raises(OrderTooLargeError):
        build_var_design(TimeSeries(np.arange(5.0)), TimeSeries(np.arange(5.0)), 2)
    with pytest.raises(LengthMismatchError):
        build_var_design(TimeSeries([1.0, 2, 3]), TimeSeries([1.0, 2]), 1)
    with pytest.raises(NonFiniteError):
        TimeSeries([1.0, np.nan, 2.0])
    with pytest.raises(NonFiniteError):
        build_ar_design([1.0, np.inf, 2.0, 3.0], 1)


def test_series_is_immutable():
    s = TimeSeries([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        s.samples[0] = 5.0
    with pytest.raises(AttributeError):
        s.name = "other"
