"""The four evaluation protocols: referring expression, generalized
zero-shot with the multi-label adaptation, one-shot episodes, and
generalized (affordance/attribute) prompts.

Every protocol reads the trained checkpoint without mutating it and
reports threshold-dependent IoU columns next to threshold-free AP.
"""

import logging

import numpy as np

from ..conditioning import condition_from_text, condition_from_visual
from ..datasets.affordances import load_union_mask
from ..datasets.records import _read_image
from ..decoder import segment_logits
from ..errors import DegenerateMaskError, InputError
from ..metrics import MetricAccumulator, ap_finalize, best_threshold, iou_bin, iou_fg

log = logging.getLogger(__name__)


def predict_probabilities(model, image, cond):
    return segment_logits(model.decoder, model.readout(image), cond).probabilities()


def best_threshold_for_model(model, samples, thresholds=None):
    """Grid-search the operating threshold on a validation stream."""
    pairs = []
    for s in samples:
        cond = condition_from_text(model.backbone, s.phrase)
        pairs.append((predict_probabilities(model, s.image, cond), s.mask))
    return best_threshold(pairs, thresholds=thresholds)


def eval_referring(model, samples, t, thresholds=None):
    """Text-prompt segmentation over the full stream, negatives included.

    mIoU averages per-sample foreground IoU (an all-background prediction
    on a negative scores 1.0); IoU_FG pools pixel counts over the stream.
    """
    samples = list(samples)
    acc = MetricAccumulator(thresholds)
    per_sample = []
    inter = union = 0
    for s in samples:
        cond = condition_from_text(model.backbone, s.phrase)
        probs = predict_probabilities(model, s.image, cond)
        pred = probs >= t
        gt = s.mask
        acc.add(probs, gt)
        inter += int(np.count_nonzero(pred & gt))
        union += int(np.count_nonzero(pred | gt))
        per_sample.append(
            {
                "phrase": s.phrase,
                "iou_fg": iou_fg(pred, gt),
                "gt_fraction": float(gt.mean()),
                "negative": bool(s.negative),
            }
        )
    return {
        "protocol": "referring",
        "t": t,
        "mIoU": float(np.mean([r["iou_fg"] for r in per_sample])),
        "IoU_FG": inter / union if union else 1.0,
        "AP": ap_finalize(acc),
        "n_images": len(samples),
        "n_pixels": acc.n_pixels,
        "per_sample": per_sample,
    }


def multilabel_map(model, image, class_names, prompt_template="{}"):
    """One binary forward per class; per-pixel argmax over the stacked
    probability maps (ties resolve to the lowest class index)."""
    if not class_names:
        raise InputError("class list must be nonempty")
    stacked = np.stack(
        [
            predict_probabilities(
                model, image, condition_from_text(model.backbone, prompt_template.format(name))
            )
            for name in class_names
        ]
    )
    return np.argmax(stacked, axis=0), stacked


def eval_zero_shot_multilabel(
    model, image_gt_pairs, class_names, seen, unseen, prompt_template="{}", ignore_index=-1
):
    """Multi-label adaptation of the binary model.

    ``image_gt_pairs``: (image, int class map) pairs; pixels equal to
    ``ignore_index`` are excluded. Per-class IoU pools counts over images
    containing the class; mIoU_S / mIoU_U average over the partitions.
    """
    class_names = list(class_names)
    if not class_names:
        raise InputError("class list must be nonempty")
    index = {name: i for i, name in enumerate(class_names)}
    inter = np.zeros(len(class_names), dtype=np.int64)
    union = np.zeros(len(class_names), dtype=np.int64)
    present = np.zeros(len(class_names), dtype=bool)
    for image, gt in image_gt_pairs:
        gt = np.asarray(gt)
        pred, _ = multilabel_map(model, image, class_names, prompt_template)
        valid = gt != ignore_index
        for c in range(len(class_names)):
            gt_c = (gt == c) & valid
            if not gt_c.any():
                continue  # class-present averaging
            present[c] = True
            pred_c = (pred == c) & valid
            inter[c] += int(np.count_nonzero(pred_c & gt_c))
            union[c] += int(np.count_nonzero(pred_c | gt_c))

    def partition_miou(names):
        ious = [
            inter[index[n]] / union[index[n]]
            for n in names
            if n in index and present[index[n]]
        ]
        return float(np.mean(ious)) if ious else float("nan")

    per_class = {
        name: (inter[i] / union[i] if present[i] else None)
        for name, i in index.items()
    }
    return {
        "protocol": "zeroshot",
        "mIoU_S": partition_miou(seen),
        "mIoU_U": partition_miou(unseen),
        "per_class": per_class,
        "n_images": len(list(image_gt_pairs)),
    }


def eval_one_shot(model, episodes, recipe="best", t=0.3, thresholds=None):
    """Support-conditioned segmentation over (support, query) episodes;
    degenerate support masks skip the episode and are counted."""
    acc = MetricAccumulator(thresholds)
    ious, bins = [], []
    skipped = 0
    for i, (support_image, support_mask, query_image, query_gt) in enumerate(episodes):
        try:
            cond = condition_from_visual(
                model.backbone, support_image, support_mask, recipe,
                crop_output_size=model.backbone.config.native_image_size,
            )
        except DegenerateMaskError:
            skipped += 1
            log.warning("episode %d skipped: degenerate support mask", i)
            continue
        probs = predict_probabilities(model, query_image, cond)
        pred = probs >= t
        gt = np.asarray(query_gt).astype(bool)
        acc.add(probs, gt)
        ious.append(iou_fg(pred, gt))
        bins.append(iou_bin(pred, gt))
    return {
        "protocol": "oneshot",
        "t": t,
        "recipe": recipe,
        "mIoU": float(np.mean(ious)) if ious else float("nan"),
        "IoU_BIN": float(np.mean(bins)) if bins else float("nan"),
        "AP": ap_finalize(acc) if ious else float("nan"),
        "n_episodes": len(ious),
        "skipped": skipped,
    }


def materialize_subsets(subsets, root="."):
    """Resolve path-based PromptSubset items to in-memory (image, union
    mask) pairs for the generalized protocol."""
    rows = []
    for sub in subsets:
        pairs = [
            (_read_image(f"{root}/{image}"), load_union_mask(masks, root=root))
            for image, masks in sub.items
        ]
        rows.append({"prompt": sub.prompt, "group": sub.group, "pairs": pairs})
    return rows


def eval_generalized(model, rows, t, thresholds=None):
    """Per generalized prompt: segment with the prompt as text against the
    union-of-category target; empty subsets report n/a."""
    results = []
    for row in rows:
        if not row["pairs"]:
            results.append(
                {"prompt": row["prompt"], "group": row["group"], "status": "n/a"}
            )
            continue
        cond = condition_from_text(model.backbone, row["prompt"])
        acc = MetricAccumulator(thresholds)
        ious = []
        for image, union_mask in row["pairs"]:
            probs = predict_probabilities(model, image, cond)
            gt = np.asarray(union_mask).astype(bool)
            acc.add(probs, gt)
            ious.append(iou_fg(probs >= t, gt))
        results.append(
            {
                "prompt": row["prompt"],
                "group": row["group"],
                "status": "ok",
                "mIoU": float(np.mean(ious)),
                "AP": ap_finalize(acc),
                "n_images": len(ious),
            }
        )
    return results
