import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qmee_granger.exceptions import NonFiniteError
from qmee_granger.quantizer import _quantize_py, quantize

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
error_vectors = arrays(np.float64, st.integers(1, 200), elements=finite)


def test_hand_trace():
    # 0.0 -> new c0; 0.1 -> |0.1 - 0| <= 0.2, joins c0; 0.5 -> 0.5 > 0.2, new c1
    cb = quantize([0.0, 0.1, 0.5], 0.2)
    np.testing.assert_array_equal(cb.codewords, [0.0, 0.5])
    np.testing.assert_array_equal(cb.counts, [2, 1])
    np.testing.assert_array_equal(cb.assignments, [0, 0, 1])
    np.testing.assert_array_equal(cb.quantized(), [0.0, 0.0, 0.5])


def test_zero_threshold_keeps_distinct_values_in_order():
    e = np.array([3.0, 1.0, 3.0, 2.0, 1.0, 3.0])
    cb = quantize(e, 0.0)
    np.testing.assert_array_equal(cb.codewords, [3.0, 1.0, 2.0])
    np.testing.assert_array_equal(cb.counts, [3, 2, 1])
    np.testing.assert_array_equal(cb.quantized(), e)


@pytest.mark.parametrize("eps", [0.0, 0.4, 10.0])
def test_constant_input(eps):
    cb = quantize(np.full(17, 3.7), eps)
    assert cb.size == 1
    np.testing.assert_array_equal(cb.counts, [17])


def test_tie_goes_to_lower_index():
    # 1.0 is equidistant from codewords 2.0 (index 0) and 0.0 (index 1)
    cb = quantize([2.0, 0.0, 1.0], 1.0)
    assert cb.assignments[2] == 0
    cb = quantize([0.0, 2.0, 1.0], 1.0)
    assert cb.assignments[2] == 0


def test_non_finite_rejected():
    with pytest.raises(NonFiniteError):
        quantize([0.0, np.nan], 0.1)


@settings(max_examples=1000, deadline=None)
@given(e=error_vectors, eps=st.floats(0, 5))
def test_codebook_invariants(e, eps):
    cb = quantize(e, eps)
    assert cb.counts.sum() == e.size
    assert cb.size <= e.size
    assert np.max(np.abs(e - cb.quantized())) <= eps
    assert np.all(cb.counts >= 1)
    # codewords are input values, pairwise farther apart than eps
    assert np.all(np.isin(cb.codewords, e))
    if cb.size > 1:
        assert np.min(np.diff(np.sort(cb.codewords))) > eps


@settings(max_examples=1000, deadline=None)
@given(e=error_vectors, seed=st.integers(0, 2**31))
def test_codebook_size_monotone_in_threshold(e, seed):
    grid = np.sort(np.random.default_rng(seed).uniform(0, 3, 8))
    sizes = [quantize(e, float(eps)).size for eps in np.r_[0.0, grid]]
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))
    assert sizes[0] == np.unique(e).size


@settings(max_examples=200, deadline=None)
@given(e=error_vectors, eps=st.floats(0, 5))
def test_compiled_and_pure_python_agree(e, eps):
    cb = quantize(e, eps)
    codewords, counts, assign = _quantize_py(e, eps)
    np.testing.assert_array_equal(cb.codewords, codewords)
    np.testing.assert_array_equal(cb.counts, counts)
    np.testing.assert_array_equal(cb.assignments, assign)
