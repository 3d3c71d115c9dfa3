# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for per-threshold confusion accumulation.

Single pass over the pixels with an inline binary search into the sorted
threshold grid. Contract matches promptseg.metrics._accum_np.bin_counts
exactly (same integer histograms).
"""

import numpy as np


def bin_counts(const double[::1] probabilities,
               const unsigned char[::1] gt,
               const double[::1] thresholds):
    cdef Py_ssize_t n = probabilities.shape[0]
    cdef Py_ssize_t kt = thresholds.shape[0]
    pos = np.zeros(kt + 1, dtype=np.int64)
    neg = np.zeros(kt + 1, dtype=np.int64)
    cdef long long[::1] pos_v = pos
    cdef long long[::1] neg_v = neg
    cdef Py_ssize_t i, lo, hi, mid
    cdef double p
    for i in range(n):
        p = probabilities[i]
        # lo = number of thresholds <= p (searchsorted side="right")
        lo = 0
        hi = kt
        while lo < hi:
            mid = (lo + hi) >> 1
            if thresholds[mid] <= p:
                lo = mid + 1
            else:
                hi = mid
        if gt[i]:
            pos_v[lo] += 1
        else:
            neg_v[lo] += 1
    return pos, neg
