"""IoU metrics and memory-bounded streaming average precision."""

from .ap import (
    MetricAccumulator,
    ap_accumulate,
    ap_finalize,
    ap_merge,
    best_threshold,
    default_threshold_grid,
    write_sweep_csv,
)
from .backend import ACCUM_BACKEND, bin_counts
from .iou import binarize, iou_bin, iou_fg, miou, probabilities_from_logits

__all__ = [
    "ACCUM_BACKEND",
    "MetricAccumulator",
    "ap_accumulate",
    "ap_finalize",
    "ap_merge",
    "best_threshold",
    "bin_counts",
    "binarize",
    "default_threshold_grid",
    "iou_bin",
    "iou_fg",
    "miou",
    "probabilities_from_logits",
    "write_sweep_csv",
]
