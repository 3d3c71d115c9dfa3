"""Performance breakdowns over per-sample records, and the ablation runner."""

from dataclasses import replace

import numpy as np

from ..backbone import build_backbone
from ..decoder import init_decoder
from ..errors import ConfigurationError, InputError
from ..training import train
from .protocols import eval_one_shot, eval_referring

SIZE_BUCKETS = ((0.0, "empty"), (0.02, "small"), (0.10, "medium"), (1.0, "large"))

BREAKDOWN_KEYS = ("object-size", "prompt-template", "class")


def size_bucket(gt_fraction):
    if gt_fraction == 0.0:
        return "empty"
    for upper, label in SIZE_BUCKETS[1:]:
        if gt_fraction <= upper:
            return label
    return "large"


def breakdown(per_sample, key):
    """Grouped mean IoU with group counts; groups recombine exactly to the
    global mean when weighted by count."""
    if key not in BREAKDOWN_KEYS:
        raise InputError(f"unknown breakdown key {key!r}; expected one of {BREAKDOWN_KEYS}")
    rows = list(per_sample)
    if not rows:
        raise InputError("breakdown needs per-sample records")

    def group_of(row):
        if key == "object-size":
            return size_bucket(row["gt_fraction"])
        if key == "prompt-template":
            if "template" not in row:
                raise InputError("per-sample records carry no prompt template")
            return row["template"]
        return row["phrase"]

    groups = {}
    for row in rows:
        groups.setdefault(group_of(row), []).append(row["iou_fg"])
    out = {
        name: {"mean_iou": float(np.mean(vals)), "count": len(vals)}
        for name, vals in sorted(groups.items())
    }
    out["_global"] = {
        "mean_iou": float(np.mean([r["iou_fg"] for r in rows])),
        "count": len(rows),
    }
    return out


def build_episodes(samples, rng):
    """Pair each sample with a same-phrase support from the rest; phrases
    without peers are dropped (no self-supports)."""
    by_phrase = {}
    for i, s in enumerate(samples):
        by_phrase.setdefault(s.phrase, []).append(i)
    episodes = []
    for i, s in enumerate(samples):
        peers = [j for j in by_phrase[s.phrase] if j != i]
        if not peers:
            continue
        sup = samples[peers[int(rng.integers(len(peers)))]]
        episodes.append((sup.image, sup.mask, s.image, s.mask))
    return episodes


def _apply_overrides(config, overrides, what):
    try:
        return replace(config, **overrides)
    except TypeError as exc:
        raise ConfigurationError(f"unknown {what} field in ablation delta: {exc}") from None


def run_ablation(
    backbone_config,
    decoder_config,
    train_config,
    deltas,
    train_samples,
    eval_samples,
    t=0.5,
    seed=0,
):
    """Train and evaluate one variant per config delta.

    Each delta may override backbone / decoder / train fields and the
    visual-prompt recipe; rows report text-based and visual-based metrics
    side by side plus the decoder parameter count.
    """
    rows = []
    rng = np.random.default_rng(seed)
    for name, delta in deltas.items():
        bb_cfg = _apply_overrides(backbone_config, delta.get("backbone", {}), "backbone")
        dec_cfg = _apply_overrides(decoder_config, delta.get("decoder", {}), "decoder")
        tr_cfg = _apply_overrides(train_config, delta.get("train", {}), "train")
        if "recipe" in delta:
            tr_cfg = replace(tr_cfg, recipe=delta["recipe"])
        backbone = build_backbone(bb_cfg)
        decoder, report = init_decoder(dec_cfg, seed=seed)
        train(backbone, decoder, train_samples, tr_cfg)

        from ..pipeline import PromptSegModel

        model = PromptSegModel(backbone, decoder)
        text = eval_referring(model, eval_samples, t)
        episodes = build_episodes(list(eval_samples), rng)
        visual = eval_one_shot(model, episodes, recipe=tr_cfg.recipe, t=t)
        rows.append(
            {
                "name": name,
                "decoder_params": report["total"],
                "mIoU_text": text["mIoU"],
                "AP_text": text["AP"],
                "mIoU_visual": visual["mIoU"],
                "AP_visual": visual["AP"],
            }
        )
    return rows


def format_ablation_table(rows):
    header = (
        f"{'variant':<24}{'params':>10}{'mIoU txt':>10}{'AP txt':>9}"
        f"{'mIoU vis':>10}{'AP vis':>9}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r['name']:<24}{r['decoder_params']:>10}"
            f"{r['mIoU_text']:>10.3f}{r['AP_text']:>9.3f}"
            f"{r['mIoU_visual']:>10.3f}{r['AP_visual']:>9.3f}"
        )
    return "\n".join(lines)
