"""NumPy kernel for per-threshold confusion accumulation.

Drop-in fallback for the compiled Cython kernel; both return identical
integer histograms.
"""

import numpy as np


def bin_counts(probabilities, gt, thresholds):
    """Histogram pixels by how many grid thresholds they meet.

    Bucket b counts pixels whose probability is >= exactly the b smallest
    thresholds (prediction is positive at a threshold t iff p >= t).
    Returns (pos_hist, neg_hist), each int64 of length len(thresholds)+1.
    Per-threshold TP/FP follow as suffix sums over the histograms.
    """
    k = np.searchsorted(thresholds, probabilities, side="right")
    nbins = thresholds.size + 1
    g = gt.view(bool) if gt.dtype == np.uint8 else gt.astype(bool)
    pos = np.bincount(k[g], minlength=nbins).astype(np.int64)
    neg = np.bincount(k[~g], minlength=nbins).astype(np.int64)
    return pos, neg
