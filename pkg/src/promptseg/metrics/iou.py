"""IoU family: foreground IoU, binary IoU, class-mean IoU, thresholding."""

import numpy as np

from ..errors import InputError


def probabilities_from_logits(logits):
    """Logistic squashing at the metrics boundary; accumulators see [0,1]."""
    x = np.asarray(logits, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def binarize(probabilities, t):
    """Pixel is foreground iff probability >= t; t must lie strictly in (0,1)."""
    if not 0.0 < t < 1.0:
        raise InputError(f"threshold must be in (0, 1), got {t}")
    return np.asarray(probabilities) >= t


def _as_binary(mask, name):
    arr = np.asarray(mask)
    if arr.dtype != bool:
        vals = np.unique(arr)
        if not np.isin(vals, (0, 1)).all():
            raise InputError(f"{name} must be binary, found values {vals[:8]}")
        arr = arr.astype(bool)
    return arr


def iou_fg(pred, gt):
    """Foreground intersection over union; both-empty is defined as 1.0."""
    p = _as_binary(pred, "pred")
    g = _as_binary(gt, "gt")
    if p.shape != g.shape:
        raise InputError(f"shape mismatch: pred {p.shape} vs gt {g.shape}")
    union = int(np.count_nonzero(p | g))
    if union == 0:
        return 1.0
    return float(np.count_nonzero(p & g)) / union


def iou_bin(pred, gt):
    """Mean of foreground IoU and background IoU."""
    p = _as_binary(pred, "pred")
    g = _as_binary(gt, "gt")
    return 0.5 * (iou_fg(p, g) + iou_fg(~p, ~g))


def miou(per_class_ious):
    """Unweighted mean over per-class foreground IoUs."""
    values = list(per_class_ious)
    if not values:
        raise InputError("miou over an empty class list")
    return float(np.mean(values))
