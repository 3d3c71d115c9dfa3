"""Memory-bounded streaming average precision over a fixed threshold grid.

Pixels are never retained: each image contributes per-threshold confusion
counts, accumulators merge by integer addition (associative, commutative),
and the final AP integrates the precision-recall curve with Simpson's rule
(trapezoid fallback for a final odd interval).
"""

import numpy as np

from ..errors import ConfigurationError, InputError
from .backend import bin_counts
from .iou import iou_fg


def default_threshold_grid(n=256):
    """n uniformly spaced thresholds strictly inside (0, 1)."""
    return (np.arange(n, dtype=np.float64) + 0.5) / n


class MetricAccumulator:
    """Mergeable per-threshold confusion statistics.

    Internally stores histograms of "number of grid thresholds met" per
    pixel (positives and negatives separately); TP/FP/FN/TN per threshold
    are suffix sums over those histograms, so merging is plain int64
    addition and therefore exact.
    """

    def __init__(self, thresholds=None, partition_key=None):
        t = default_threshold_grid() if thresholds is None else np.asarray(
            thresholds, dtype=np.float64
        )
        if t.ndim != 1 or t.size == 0:
            raise InputError("threshold grid must be a nonempty 1-D array")
        if not (np.all(t > 0.0) and np.all(t < 1.0)):
            raise InputError("thresholds must lie strictly inside (0, 1)")
        if np.any(np.diff(t) <= 0):
            raise InputError("thresholds must be strictly ascending")
        self.thresholds = t
        self.partition_key = partition_key
        self._pos_hist = np.zeros(t.size + 1, dtype=np.int64)
        self._neg_hist = np.zeros(t.size + 1, dtype=np.int64)
        self.n_images = 0

    # -- accumulation ------------------------------------------------------

    def add(self, probabilities, gt):
        p = np.asarray(probabilities)
        g = np.asarray(gt)
        if p.shape != g.shape:
            raise InputError(f"shape mismatch: probabilities {p.shape} vs gt {g.shape}")
        pos, neg = bin_counts(p, g, self.thresholds)
        self._pos_hist += pos
        self._neg_hist += neg
        self.n_images += 1
        return self

    def merge(self, other):
        if not np.array_equal(self.thresholds, other.thresholds):
            raise ConfigurationError("cannot merge accumulators with different threshold grids")
        out = MetricAccumulator(self.thresholds, partition_key=self.partition_key)
        out._pos_hist = self._pos_hist + other._pos_hist
        out._neg_hist = self._neg_hist + other._neg_hist
        out.n_images = self.n_images + other.n_images
        return out

    # -- per-threshold views ----------------------------------------------

    @property
    def tp(self):
        # suffix sum, skipping bucket 0 (pixels below every threshold)
        return np.cumsum(self._pos_hist[::-1])[::-1][1:]

    @property
    def fp(self):
        return np.cumsum(self._neg_hist[::-1])[::-1][1:]

    @property
    def fn(self):
        return int(self._pos_hist.sum()) - self.tp

    @property
    def tn(self):
        return int(self._neg_hist.sum()) - self.fp

    @property
    def n_pixels(self):
        return int(self._pos_hist.sum() + self._neg_hist.sum())

    # -- finalization -------------------------------------------------------

    def average_precision(self):
        """Area under the precision-recall curve via Simpson integration.

        Returns NaN when the stream contained no positive pixels.
        """
        n_pos = int(self._pos_hist.sum())
        if n_pos == 0:
            return float("nan")
        tp = self.tp.astype(np.float64)
        fp = self.fp.astype(np.float64)

        # walk thresholds in descending order -> recall weakly ascending
        tp = tp[::-1]
        fp = fp[::-1]
        predicted = tp + fp
        defined = predicted > 0
        if not defined.any():
            return 0.0
        recall = tp[defined] / n_pos
        precision = tp[defined] / predicted[defined]

        # one point per distinct recall; the first occurrence (highest
        # threshold) has the fewest false positives, hence max precision
        _, first = np.unique(recall, return_index=True)
        recall = recall[first]
        precision = precision[first]
        if recall[0] > 0.0:
            recall = np.r_[0.0, recall]
            precision = np.r_[precision[0], precision]
        if recall.size < 2 or recall[-1] == 0.0:
            return 0.0
        # AP is the area under the right-continuous step curve (precision
        # changes where recall does).  Simpson on the raw threshold samples
        # is unstable when consecutive recall gaps differ by orders of
        # magnitude, so sample the step curve on a uniform recall grid and
        # integrate there.
        xs = np.linspace(0.0, recall[-1], 513)
        ys = precision[np.searchsorted(recall, xs, side="left")]
        area = _simpson_uniform(ys, xs[1] - xs[0])
        return float(min(max(area, 0.0), 1.0))


def _simpson_uniform(y, h):
    """Composite Simpson over uniformly spaced samples; a trailing odd
    interval falls back to the trapezoid rule."""
    n = y.size - 1  # interval count
    area = 0.0
    i = 0
    while i + 2 <= n:
        area += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2])
        i += 2
    if i == n - 1:
        area += 0.5 * h * (y[i] + y[i + 1])
    return area


def write_sweep_csv(acc, path):
    """Per-threshold confusion counts and precision/recall as CSV."""
    import csv

    tp, fp, fn, tn = acc.tp, acc.fp, acc.fn, acc.tn
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "tp", "fp", "fn", "tn", "precision", "recall"])
        for j, t in enumerate(acc.thresholds):
            predicted = tp[j] + fp[j]
            positives = tp[j] + fn[j]
            writer.writerow(
                [
                    f"{t:.8f}",
                    int(tp[j]),
                    int(fp[j]),
                    int(fn[j]),
                    int(tn[j]),
                    f"{tp[j] / predicted:.8f}" if predicted else "",
                    f"{tp[j] / positives:.8f}" if positives else "",
                ]
            )
    return path


def ap_accumulate(acc, probabilities, gt):
    """Fold one image's pixels into the accumulator."""
    return acc.add(probabilities, gt)


def ap_merge(a, b):
    """Combine two accumulators; requires identical threshold grids."""
    return a.merge(b)


def ap_finalize(acc):
    """Precision-recall curve over the grid, integrated by Simpson's rule."""
    return acc.average_precision()


def best_threshold(prob_gt_pairs, thresholds=None, metric=None):
    """Pick the grid threshold maximizing the task metric (mean foreground
    IoU over samples by default); ties resolve to the smallest threshold.
    """
    t = default_threshold_grid() if thresholds is None else np.asarray(
        thresholds, dtype=np.float64
    )
    if metric is None:
        metric = iou_fg
    scores = np.zeros(t.size, dtype=np.float64)
    n = 0
    for probabilities, gt in prob_gt_pairs:
        p = np.asarray(probabilities)
        g = np.asarray(gt).astype(bool)
        for j, tj in enumerate(t):
            scores[j] += metric(p >= tj, g)
        n += 1
    if n == 0:
        raise InputError("best_threshold requires a nonempty validation stream")
    best = int(np.argmax(scores))  # argmax returns the first (smallest t) on ties
    return float(t[best])
