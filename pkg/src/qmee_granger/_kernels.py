"""numba-compiled inner loops; ``None`` when numba is unavailable."""

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None


def _quantize_scan(e, eps):
    # plain nearest-codeword scan; strict '<' keeps the lower index on ties
    n = e.shape[0]
    codewords = np.empty(n)
    counts = np.zeros(n, dtype=np.int64)
    assign = np.empty(n, dtype=np.intp)
    m = 0
    for i in range(n):
        v = e[i]
        best = -1
        best_dist = np.inf
        for k in range(m):
            dist = abs(v - codewords[k])
            if dist < best_dist:
                best_dist = dist
                best = k
        if best >= 0 and best_dist <= eps:
            counts[best] += 1
            assign[i] = best
        else:
            codewords[m] = v
            counts[m] = 1
            assign[i] = m
            m += 1
    return codewords[:m].copy(), counts[:m].copy(), assign


def _weighted_kernel_sums(e, width, eps, quantized):
    # s_i = sum_m A_m G(e_i - c_m), t_i = sum_m A_m G(e_i - c_m) c_m
    n = e.shape[0]
    if quantized:
        centers, counts, _ = quantize_scan(e, eps)
        weights = counts.astype(np.float64)
    else:
        centers = e
        weights = np.ones(n)
    m = centers.shape[0]
    inv = 1.0 / (2.0 * width * width)
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * width)
    s = np.empty(n)
    t = np.empty(n)
    for i in range(n):
        si = 0.0
        ti = 0.0
        ei = e[i]
        for k in range(m):
            diff = ei - centers[k]
            g = weights[k] * math.exp(-inv * diff * diff)
            si += g
            ti += g * centers[k]
        s[i] = si * norm
        t[i] = ti * norm
    return s, t


if njit is not None:
    quantize_scan = njit(cache=True, nogil=True)(_quantize_scan)
    weighted_kernel_sums = njit(cache=True, nogil=True)(_weighted_kernel_sums)
else:  # pragma: no cover
    quantize_scan = None
    weighted_kernel_sums = None
