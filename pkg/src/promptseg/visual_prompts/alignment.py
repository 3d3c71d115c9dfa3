"""Alignment study: how much does an engineered prompt image raise the
encoder's alignment with the target object name?"""

import csv
import logging
from dataclasses import dataclass

import numpy as np
import torch

from ..backbone import AttentionMaskPolicy, patch_grid_mask
from ..errors import InputError, PromptSegError
from .compose import (
    ATTENTION_STRATEGIES,
    compose_prompt,
    get_recipe,
    is_attention_strategy,
)

log = logging.getLogger(__name__)

SOFTMAX_SCALE = 100.0  # alignment logits are cosines; sharpen for readability


@dataclass
class AlignmentResult:
    recipe_id: str
    delta_p: float  # raw cosine-alignment difference
    delta_p_x100: float  # same, scaled x100 for table readability
    softmax_distribution: np.ndarray
    candidate_names: tuple


def _unit(v):
    return v / v.norm()


def highlighted_embedding(backbone, image, mask, strategy_id, crop_output_size=None):
    """Joint-space embedding of the image with the target highlighted,
    either by composing a new image or by masking attention in-encoder."""
    size = crop_output_size or backbone.config.native_image_size
    if is_attention_strategy(strategy_id):
        mode, layer_spec = ATTENTION_STRATEGIES[strategy_id]
        layer = backbone.config.num_layers - 1 if layer_spec == "last" else None
        policy = AttentionMaskPolicy(
            mode=mode,
            mask=patch_grid_mask(mask, backbone.config.patch_size),
            layer=layer,
        )
        return backbone.encode_image(image, readout_layers=(), policy=policy).image_embedding
    composed = compose_prompt(image, mask, get_recipe(strategy_id), crop_output_size=size)
    return backbone.encode_image(composed, readout_layers=()).image_embedding


def alignment_delta(backbone, image, mask, target_name, candidate_names, strategy_id):
    """Increase in target-name alignment from highlighting, plus the
    softmax distribution over all candidate names for the highlighted image."""
    candidates = tuple(candidate_names)
    if target_name not in candidates:
        raise InputError(f"target {target_name!r} missing from candidate names")
    if candidates.index(target_name) != 0:
        # keep the target in slot 0 so delta_p reads off the first alignment
        candidates = (target_name,) + tuple(c for c in candidates if c != target_name)

    s_o = _unit(backbone.encode_image(image, readout_layers=()).image_embedding)
    s_h = _unit(highlighted_embedding(backbone, image, mask, strategy_id))
    t = torch.stack([_unit(backbone.encode_text(name)) for name in candidates])

    alignments = t @ s_h
    # same kernel for both sides so a no-op recipe gives exactly zero
    delta = float(alignments[0] - (t @ s_o)[0])
    distribution = torch.softmax(SOFTMAX_SCALE * alignments, dim=0).numpy()
    return AlignmentResult(
        recipe_id=strategy_id,
        delta_p=delta,
        delta_p_x100=100.0 * delta,
        softmax_distribution=distribution,
        candidate_names=candidates,
    )


def run_prompt_benchmark(backbone, samples, strategy_ids, out_csv=None):
    """Mean alignment improvement per strategy over a sample set.

    ``samples``: iterable of (image, mask, target_name, distractor_names).
    Per-sample failures are logged and skipped; rows come back sorted by
    mean delta, descending.
    """
    samples = list(samples)
    strategy_ids = list(strategy_ids)
    if not samples or not strategy_ids:
        raise InputError("benchmark needs nonempty sample and recipe lists")
    rows = []
    for sid in strategy_ids:
        deltas = []
        skipped = 0
        for i, (image, mask, target, distractors) in enumerate(samples):
            try:
                res = alignment_delta(
                    backbone, image, mask, target, (target, *distractors), sid
                )
                deltas.append(res.delta_p_x100)
            except PromptSegError as exc:
                skipped += 1
                log.warning("sample %d skipped for %s: %s", i, sid, exc)
        rows.append(
            {
                "recipe_id": sid,
                "n_samples": len(deltas),
                "mean_delta_p": float(np.mean(deltas)) if deltas else float("nan"),
                "std": float(np.std(deltas)) if deltas else float("nan"),
                "skipped": skipped,
            }
        )
    rows.sort(key=lambda r: -r["mean_delta_p"] if np.isfinite(r["mean_delta_p"]) else np.inf)
    if out_csv is not None:
        with open(out_csv, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["recipe_id", "n_samples", "mean_delta_p", "std", "skipped"]
            )
            writer.writeheader()
            writer.writerows(rows)
    return rows


def format_benchmark_table(rows):
    header = f"{'recipe':<28}{'n':>6}{'mean dP(x100)':>16}{'std':>10}{'skipped':>9}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r['recipe_id']:<28}{r['n_samples']:>6}"
            f"{r['mean_delta_p']:>16.3f}{r['std']:>10.3f}{r['skipped']:>9}"
        )
    return "\n".join(lines)
