import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

# make tests/oracles.py importable regardless of invocation directory
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def toy_bundle(tmp_path_factory):
    """One overfit toy model shared across suites: tiny stand-in backbone,
    synthetic PC+ dataset on disk, trained decoder, saved checkpoint."""
    from promptseg.backbone import build_backbone, tiny_config
    from promptseg.datasets import (
        build_phrasecut_plus,
        load_sample,
        synth_dataset,
        write_records,
    )
    from promptseg.decoder import DecoderConfig, init_decoder
    from promptseg.pipeline import PromptSegModel, save_model
    from promptseg.training import TrainConfig, train

    root = tmp_path_factory.mktemp("toy")
    data_dir = root / "data"
    backbone = build_backbone(tiny_config())
    records = synth_dataset(data_dir, n=16, seed=5)
    plus = build_phrasecut_plus(records, q_neg=0.15, rng=np.random.default_rng(0))
    write_records(plus, data_dir / "index_plus.jsonl")
    samples = [load_sample(r, root=data_dir) for r in plus]

    decoder_cfg = DecoderConfig(
        token_width=32,
        readout_layers=(1, 2, 3),
        patch_size=backbone.config.patch_size,
        backbone_token_width=backbone.config.token_width,
        embed_width=backbone.config.embed_width,
    )
    decoder, _ = init_decoder(decoder_cfg, seed=0)
    train(
        backbone,
        decoder,
        samples,
        TrainConfig(iterations=1500, batch_size=8, lr0=5e-3, lr_final=1e-4, seed=0),
    )
    model = PromptSegModel(backbone, decoder)
    checkpoint = root / "toy.ckpt"
    save_model(checkpoint, model)
    return SimpleNamespace(
        model=model,
        backbone=backbone,
        samples=samples,
        records=plus,
        data_dir=data_dir,
        checkpoint=checkpoint,
    )
