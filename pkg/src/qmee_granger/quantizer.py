"""Online scalar quantizer producing a codebook with multiplicities.

Single pass in input order: each sample joins its nearest codeword when the
distance is at most ``epsilon``, otherwise it becomes a new codeword.
Codewords never move once created, so every quantized value is a member of
the codebook. Equidistant codewords resolve to the lower index.
"""

from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import as_finite_vector, check_positive

from ._kernels import quantize_scan as _quantize_fast


@dataclass(frozen=True)
class Codebook:
    codewords: np.ndarray
    counts: np.ndarray
    epsilon: float
    assignments: Optional[np.ndarray] = None

    @property
    def size(self):
        return self.codewords.shape[0]

    def quantized(self):
        """``Q(e)`` for every input sample."""
        if self.assignments is None:
            raise ValueError("codebook was built without assignments")
        return self.codewords[self.assignments]


def _quantize_py(e, eps):
    # sorted view of the codewords; distinct codewords are > eps apart, so
    # the nearest one is always a sorted neighbour of the insertion point
    sorted_vals = []
    sorted_idx = []
    codewords = []
    counts = []
    assign = np.empty(e.shape[0], dtype=np.intp)

    for i, v in enumerate(e.tolist()):
        pos = bisect_left(sorted_vals, v)
        best = -1
        best_dist = np.inf
        if pos < len(sorted_vals):
            best = sorted_idx[pos]
            best_dist = sorted_vals[pos] - v
        if pos > 0:
            dist = v - sorted_vals[pos - 1]
            idx = sorted_idx[pos - 1]
            if dist < best_dist or (dist == best_dist and idx < best):
                best, best_dist = idx, dist
        if best >= 0 and best_dist <= eps:
            counts[best] += 1
            assign[i] = best
        else:
            best = len(codewords)
            codewords.append(v)
            counts.append(1)
            sorted_vals.insert(pos, v)
            sorted_idx.insert(pos, best)
            assign[i] = best
    return (np.array(codewords, dtype=np.float64), np.array(counts, dtype=np.int64), assign)


def quantize(errors, epsilon):
    """Compress ``errors`` into a codebook with threshold ``epsilon``.

    Parameters
    ----------
    errors : array_like of shape (n,)
    epsilon : float
        Merge radius, ``>= 0``. Zero keeps every distinct value.

    Returns
    -------
    Codebook
    """
    e = as_finite_vector(errors, name="errors")
    eps = check_positive(epsilon, "epsilon", strict=False)
    if _quantize_fast is not None:
        codewords, counts, assign = _quantize_fast(e, eps)
    else:
        codewords, counts, assign = _quantize_py(e, eps)
    return Codebook(codewords=codewords, counts=counts, epsilon=eps, assignments=assign)
