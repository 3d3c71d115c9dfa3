"""Command-line entry points: train, eval, predict, build-dataset,
prompt-bench, serve.

Exit codes: 0 success, 1 handled error, 2 usage error.
"""

import json
import os
import sys
from pathlib import Path

import click
import cv2
import numpy as np
import yaml

from .backbone import BackboneConfig, build_backbone
from .conditioning import PromptSpec
from .datasets import (
    affordance_subsets,
    build_phrasecut_plus,
    load_affordance_mapping,
    load_sample,
    read_records,
    synth_dataset,
    write_records,
)
from .decoder import DecoderConfig, init_decoder
from .errors import InputError, PromptSegError
from .evalharness import (
    build_episodes,
    eval_generalized,
    eval_one_shot,
    eval_referring,
    eval_zero_shot_multilabel,
    materialize_subsets,
)
from .pipeline import load_model
from .training import TrainConfig, train
from .visual_prompts import format_benchmark_table, registered_strategy_ids, run_prompt_benchmark

ENV_CHECKPOINT = "PROMPTSEG_CHECKPOINT"
ENV_PORT = "PROMPTSEG_PORT"


@click.group()
def cli():
    """Prompt-conditioned binary image segmentation."""


def _checkpoint_option(value):
    ckpt = value or os.environ.get(ENV_CHECKPOINT)
    if not ckpt:
        raise click.UsageError(
            f"no checkpoint given (use --checkpoint or {ENV_CHECKPOINT})"
        )
    return ckpt


def _load_samples(data, root=None):
    data = Path(data)
    if data.is_dir():
        root = data
        data = data / "index.jsonl"
    records = read_records(data)
    return [load_sample(r, root=root or data.parent) for r in records], records


@cli.command("train")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def train_cmd(config_path):
    """Train the decoder per a YAML config."""
    cfg = yaml.safe_load(Path(config_path).read_text())
    backbone_cfg = dict(cfg.get("backbone", {}))
    weights_path = backbone_cfg.pop("weights", None)
    backbone = build_backbone(BackboneConfig(**backbone_cfg), weights_path=weights_path)
    dec_overrides = dict(cfg.get("decoder", {}))
    if "readout_layers" in dec_overrides:
        dec_overrides["readout_layers"] = tuple(dec_overrides["readout_layers"])
    decoder_cfg = DecoderConfig(
        patch_size=backbone.config.patch_size,
        backbone_token_width=backbone.config.token_width,
        embed_width=backbone.config.embed_width,
        **dec_overrides,
    )
    train_overrides = dict(cfg.get("train", {}))
    if "prefixes" in train_overrides:
        train_overrides["prefixes"] = tuple(train_overrides["prefixes"])
    train_cfg = TrainConfig(**train_overrides)
    decoder, report = init_decoder(decoder_cfg, seed=train_cfg.seed)
    click.echo(f"decoder parameters: {report['total']}")

    data = cfg["data"]
    samples, _ = _load_samples(data["records"], data.get("root"))
    out = cfg.get("out", {})
    result = train(
        backbone,
        decoder,
        samples,
        train_cfg,
        out_checkpoint=out.get("checkpoint", "checkpoint.pt"),
        loss_csv=out.get("loss_curve"),
    )
    click.echo(
        f"trained {train_cfg.iterations} steps; final loss {result.loss_curve[-1][1]:.4f}; "
        f"checkpoint {result.checkpoint_path}"
    )


@cli.command("eval")
@click.option("--protocol", required=True,
              type=click.Choice(["referring", "zeroshot", "oneshot", "generalized"]))
@click.option("--checkpoint", default=None)
@click.option("--data", required=True, type=click.Path(exists=True),
              help="dataset directory or JSON-lines index")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--threshold", "-t", default=0.5, show_default=True)
@click.option("--unseen", default="", help="comma-separated unseen class names (zeroshot)")
@click.option("--recipe", default="best", show_default=True, help="visual recipe (oneshot)")
@click.option("--mapping", default=None, type=click.Path(exists=True),
              help="prompt-to-category mapping JSON (generalized)")
def eval_cmd(protocol, checkpoint, data, out_path, threshold, unseen, recipe, mapping):
    """Evaluate a checkpoint under one of the four protocols."""
    model, _ = load_model(_checkpoint_option(checkpoint))
    samples, records = _load_samples(data)

    if protocol == "referring":
        report = eval_referring(model, samples, threshold)
        report.pop("per_sample")
    elif protocol == "zeroshot":
        class_names = sorted({s.phrase for s in samples if not s.negative})
        unseen_names = [u.strip() for u in unseen.split(",") if u.strip()]
        seen_names = [c for c in class_names if c not in unseen_names]
        pairs = []
        for s in samples:
            if s.negative:
                continue
            gt = np.full(s.mask.shape, -1, dtype=np.int64)
            gt[s.mask] = class_names.index(s.phrase)
            pairs.append((s.image, gt))
        report = eval_zero_shot_multilabel(model, pairs, class_names, seen_names, unseen_names)
    elif protocol == "oneshot":
        episodes = build_episodes(samples, np.random.default_rng(0))
        report = eval_one_shot(model, episodes, recipe=recipe, t=threshold)
    else:
        table = json.loads(Path(mapping).read_text()) if mapping else load_affordance_mapping()
        root = Path(data) if Path(data).is_dir() else Path(data).parent
        subsets = affordance_subsets(records, table)
        report = eval_generalized(model, materialize_subsets(subsets, root=root), threshold)

    Path(out_path).write_text(json.dumps(report, indent=2))
    click.echo(f"wrote {out_path}")


@cli.command("predict")
@click.option("--checkpoint", default=None)
@click.option("--image", "image_path", required=True, type=click.Path(exists=True))
@click.option("--text", default=None)
@click.option("--support-image", default=None, type=click.Path(exists=True))
@click.option("--support-mask", default=None, type=click.Path(exists=True))
@click.option("--recipe", default="best", show_default=True)
@click.option("--a", "weight", default=None, type=float, help="interpolation weight")
@click.option("--threshold", "-t", default=0.5, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--prob-out", default=None, type=click.Path(),
              help="also write the 16-bit probability map PNG")
@click.option("--overlay-out", default=None, type=click.Path(),
              help="also write a qualitative overlay of the mask on the image")
def predict_cmd(checkpoint, image_path, text, support_image, support_mask, recipe,
                weight, threshold, out_path, prob_out, overlay_out):
    """Segment one image and write a single-channel mask PNG."""
    model, _ = load_model(_checkpoint_option(checkpoint))
    bgr = cv2.imread(image_path, cv2.IMREAD_COLOR)
    if bgr is None:
        raise InputError(f"cannot read image {image_path}")
    image = cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)

    has_support = support_image and support_mask
    if text and has_support:
        kind = "interpolated"
    elif text:
        kind = "text"
    elif has_support:
        kind = "visual"
    else:
        raise click.UsageError("provide --text and/or --support-image/--support-mask")
    simg = smask = None
    if has_support:
        simg = cv2.cvtColor(cv2.imread(support_image, cv2.IMREAD_COLOR), cv2.COLOR_BGR2RGB)
        smask = cv2.imread(support_mask, cv2.IMREAD_GRAYSCALE) > 127
    spec = PromptSpec(
        kind=kind, text=text, support_image=simg, support_mask=smask,
        recipe=recipe, weight=0.5 if (kind == "interpolated" and weight is None) else weight,
    )
    logits = model.segment(image, spec)
    mask = logits.binarize(threshold)
    cv2.imwrite(out_path, mask.astype(np.uint8) * 255)
    if prob_out:
        q = np.rint(logits.probabilities() * 65535).astype(np.uint16)
        cv2.imwrite(prob_out, q)
    if overlay_out:
        from .render import render_overlay

        blended = render_overlay(image, mask)
        cv2.imwrite(overlay_out, cv2.cvtColor(blended, cv2.COLOR_RGB2BGR))
    click.echo(f"wrote {out_path} ({int(mask.sum())} foreground pixels)")


@cli.command("build-dataset")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--n", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--image-size", default=64, show_default=True)
@click.option("--q-neg", default=0.0, show_default=True,
              help="negative-sample probability for the extended index")
def build_dataset_cmd(out_dir, n, seed, image_size, q_neg):
    """Generate the synthetic shapes dataset (plus an extended index when
    q-neg > 0 or supports are wanted)."""
    records = synth_dataset(out_dir, n=n, seed=seed, image_size=image_size)
    plus = build_phrasecut_plus(records, q_neg, np.random.default_rng(seed))
    write_records(plus, Path(out_dir) / "index_plus.jsonl")
    n_neg = sum(r.negative for r in plus)
    n_sup = sum(r.support_image is not None for r in plus)
    click.echo(
        f"wrote {len(records)} samples to {out_dir} "
        f"(extended index: {n_neg} negatives, {n_sup} with supports)"
    )


@cli.command("prompt-bench")
@click.option("--samples", "samples_path", required=True, type=click.Path(exists=True))
@click.option("--recipes", default="all", show_default=True,
              help='"all" or comma-separated strategy ids')
@click.option("--out", "out_csv", required=True, type=click.Path())
@click.option("--backbone-config", default=None, type=click.Path(exists=True),
              help="YAML with BackboneConfig overrides (default: full stand-in)")
def prompt_bench_cmd(samples_path, recipes, out_csv, backbone_config):
    """Rank visual-prompt strategies by mean alignment improvement."""
    overrides = yaml.safe_load(Path(backbone_config).read_text()) if backbone_config else {}
    backbone = build_backbone(BackboneConfig(**overrides))
    loaded, records = _load_samples(samples_path)
    phrases = sorted({s.phrase for s in loaded})
    bench_samples = []
    for s in loaded:
        if s.negative or not s.mask.any():
            continue
        distractors = tuple(p for p in phrases if p != s.phrase)[:8]
        image = cv2.resize(s.image, (backbone.config.native_image_size,) * 2)
        mask = cv2.resize(
            s.mask.astype(np.uint8), (backbone.config.native_image_size,) * 2,
            interpolation=cv2.INTER_NEAREST,
        ).astype(bool)
        bench_samples.append((image, mask, s.phrase, distractors))
    ids = registered_strategy_ids() if recipes == "all" else [r.strip() for r in recipes.split(",")]
    rows = run_prompt_benchmark(backbone, bench_samples, ids, out_csv=out_csv)
    click.echo(format_benchmark_table(rows))
    click.echo(f"wrote {out_csv}")


@cli.command("serve")
@click.option("--checkpoint", default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help=f"default: ${ENV_PORT} or 8000")
def serve_cmd(checkpoint, host, port):
    """Run the HTTP inference service."""
    from .service import serve

    port = port or int(os.environ.get(ENV_PORT, "8000"))
    serve(_checkpoint_option(checkpoint), host=host, port=port)


def main():
    try:
        cli(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except PromptSegError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
