"""Backbone construction, persistence, and identity hashing."""

import hashlib
import json
from pathlib import Path

import torch

from ..errors import ConfigurationError
from .config import BackboneConfig
from .vit import DualEncoderBackbone


def build_backbone(config, weights_path=None):
    """Instantiate a frozen backbone.

    Stand-in variants are fully determined by their config (seeded init);
    the pretrained variant additionally needs a weights file.
    """
    model = DualEncoderBackbone(config)
    if config.variant == "pretrained-dual-encoder":
        if weights_path is None:
            raise ConfigurationError(
                "variant pretrained-dual-encoder requires a weights file path"
            )
        state = torch.load(weights_path, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
    model.requires_grad_(False)
    model.eval()
    return model


def sidecar_path(weights_path):
    return Path(str(weights_path) + ".meta.json")


def save_backbone(model, weights_path):
    """Write weights plus the JSON metadata sidecar next to them."""
    weights_path = Path(weights_path)
    weights_path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), weights_path)
    sidecar_path(weights_path).write_text(
        json.dumps(model.config.metadata(), indent=2, sort_keys=True)
    )
    return weights_path


def load_backbone(weights_path):
    """Rebuild a backbone from a weights file and its metadata sidecar."""
    meta = json.loads(sidecar_path(weights_path).read_text())
    meta.pop("interpolation_kernel", None)
    config = BackboneConfig(**meta)
    model = DualEncoderBackbone(config)
    state = torch.load(weights_path, map_location="cpu", weights_only=True)
    model.load_state_dict(state)
    model.requires_grad_(False)
    model.eval()
    return model


def backbone_metadata_hash(config):
    """Stable identity of a backbone configuration (pairs checkpoints with
    the encoder they were trained against)."""
    canonical = json.dumps(config.metadata(), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parameter_checksum(module):
    """SHA-256 over all parameter and buffer bytes; bitwise change detector."""
    h = hashlib.sha256()
    state = module.state_dict()
    for name in sorted(state):
        h.update(name.encode("utf-8"))
        h.update(state[name].detach().cpu().contiguous().numpy().tobytes())
    return h.hexdigest()
