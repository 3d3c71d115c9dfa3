"""Optimize the decoder (backbone frozen) with pixelwise BCE under a
cosine learning-rate schedule."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..conditioning import condition_from_text, condition_from_visual, interpolate
from ..datasets import DEFAULT_PREFIXES
from ..decoder import save_checkpoint
from ..errors import ConfigurationError, InputError, TrainingDivergedError
from ..visual_prompts import BEST_RECIPE_ID

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 20_000
    batch_size: int = 64
    lr0: float = 1e-3
    lr_final: float = 1e-4
    schedule: str = "cosine"
    mixed_precision: bool = False
    seed: int = 0
    use_visual: bool = True  # off: text-only conditionals (ablation "no visual")
    recipe: str = BEST_RECIPE_ID
    prefixes: tuple = DEFAULT_PREFIXES

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.lr_final > self.lr0:
            raise ConfigurationError("lr_final must not exceed lr0")
        if self.schedule != "cosine":
            raise ConfigurationError(f"unknown schedule {self.schedule!r}")

    def to_dict(self):
        d = self.__dict__.copy()
        d["prefixes"] = list(self.prefixes)
        return d


def cosine_lr(step, config):
    """lr(step) = lr_final + (lr0 - lr_final) * (1 + cos(pi*step/T)) / 2."""
    if not 0 <= step <= config.iterations:
        raise InputError(f"step {step} outside [0, {config.iterations}]")
    span = config.lr0 - config.lr_final
    return config.lr_final + span * (1.0 + math.cos(math.pi * step / config.iterations)) / 2.0


@dataclass
class TrainResult:
    loss_curve: list  # (step, loss, lr) triples
    checkpoint_path: object
    decoder: object
    caches: dict = field(repr=False, default_factory=dict)


class _SampleCache:
    """Frozen-backbone activations and embeddings, computed once per sample.

    Legitimate because the backbone never changes during training; only the
    interpolation weight a and the phrase prefix are re-drawn per step.
    """

    def __init__(self, backbone, samples, readout_layers, recipe, use_visual):
        self.backbone = backbone
        self.samples = samples
        self.readouts = [
            backbone.encode_image(s.image, readout_layers=readout_layers) for s in samples
        ]
        grids = {r.grid for r in self.readouts}
        if len(grids) != 1:
            raise InputError(
                f"training batch requires a uniform image size, got grids {sorted(grids)}"
            )
        self.grid = self.readouts[0].grid
        self.visual = []
        for s in samples:
            if use_visual and s.support_image is not None and s.support_mask.any():
                self.visual.append(
                    condition_from_visual(
                        backbone, s.support_image, s.support_mask, recipe,
                        crop_output_size=backbone.config.native_image_size,
                    )
                )
            else:
                self.visual.append(None)
        self._text = {}

    def text_conditional(self, index, prefix_index, prefixes):
        key = (index, prefix_index)
        if key not in self._text:
            phrase = prefixes[prefix_index] + self.samples[index].phrase
            self._text[key] = condition_from_text(self.backbone, phrase)
        return self._text[key]


def _batch_conditionals(cache, indices, config, rng):
    conds = []
    for i in indices:
        prefix_index = int(rng.integers(len(config.prefixes)))
        text = cache.text_conditional(i, prefix_index, config.prefixes)
        visual = cache.visual[i]
        if visual is None:
            conds.append(text)
        else:
            a = float(rng.uniform(0.0, 1.0))  # fresh draw every step
            conds.append(interpolate(visual, text, a))
    return torch.stack([c.values for c in conds])


def train(backbone, decoder, samples, config, out_checkpoint=None, loss_csv=None):
    """Per step: sample a batch, build conditionals (text / visual /
    interpolated), forward, pixelwise BCE against the target mask, update
    decoder parameters only. Aborts on a non-finite loss."""
    samples = list(samples)
    if not samples:
        raise InputError("training needs at least one sample")
    rng = np.random.default_rng(config.seed)
    cache = _SampleCache(
        backbone, samples, decoder.config.readout_layers, config.recipe, config.use_visual
    )
    n_layers = len(decoder.config.readout_layers)
    targets_all = torch.stack(
        [torch.from_numpy(s.mask.astype(np.float32)) for s in samples]
    )

    optimizer = torch.optim.Adam(decoder.parameters(), lr=config.lr0)
    criterion = torch.nn.BCEWithLogitsLoss()
    decoder.train()
    curve = []
    for step in range(config.iterations):
        lr = cosine_lr(step, config)
        for group in optimizer.param_groups:
            group["lr"] = lr
        indices = rng.integers(0, len(samples), size=config.batch_size)
        acts = [
            torch.stack([cache.readouts[i].layers[k] for i in indices])
            for k in range(n_layers)
        ]
        cond = _batch_conditionals(cache, indices, config, rng)
        target = targets_all[torch.from_numpy(indices)]

        optimizer.zero_grad()
        if config.mixed_precision:
            with torch.autocast("cpu", dtype=torch.bfloat16):
                logits = decoder(acts, cond, cache.grid)
                loss = criterion(logits.float(), target)
        else:
            logits = decoder(acts, cond, cache.grid)
            loss = criterion(logits, target)
        loss_value = float(loss.detach())
        if not math.isfinite(loss_value):
            raise TrainingDivergedError(
                step,
                indices.tolist(),
                f"non-finite loss {loss_value} at step {step}; batch indices {indices.tolist()}",
            )
        loss.backward()
        optimizer.step()
        curve.append((step, loss_value, lr))
    decoder.eval()

    checkpoint_path = None
    if out_checkpoint is not None:
        checkpoint_path = save_checkpoint(
            out_checkpoint,
            decoder,
            backbone.config,
            extra={
                "train_config": config.to_dict(),
                "optimizer": "adam(default betas)",
                "final_loss": curve[-1][1],
            },
        )
    if loss_csv is not None:
        Path(loss_csv).parent.mkdir(parents=True, exist_ok=True)
        with open(loss_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "loss", "lr"])
            writer.writerows(curve)
    return TrainResult(loss_curve=curve, checkpoint_path=checkpoint_path, decoder=decoder)
