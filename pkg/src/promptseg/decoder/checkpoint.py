"""Versioned checkpoint container for the decoder.

One file holds the decoder parameters, its config, the hash of the
backbone metadata it was trained against, and the parameter report.
"""

from pathlib import Path

import torch

from ..backbone import BackboneConfig, backbone_metadata_hash
from ..errors import ConfigurationError
from .model import DecoderConfig, config_hash, init_decoder, parameter_report

FORMAT_VERSION = 1


def save_checkpoint(path, decoder, backbone_config, extra=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format_version": FORMAT_VERSION,
        "decoder_state": decoder.state_dict(),
        "decoder_config": decoder.config.to_dict(),
        "decoder_config_hash": config_hash(decoder.config),
        "backbone_meta": backbone_config.metadata(),
        "backbone_meta_hash": backbone_metadata_hash(backbone_config),
        "parameter_report": parameter_report(decoder),
        "extra": extra or {},
    }
    torch.save(payload, path)
    return path


def load_checkpoint(path):
    """Rebuild (decoder, backbone_config, payload); verifies the stored
    config hash so silently reordered readout layers cannot slip through."""
    payload = torch.load(path, map_location="cpu", weights_only=False)
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ConfigurationError(
            f"checkpoint format {version!r} unsupported (expected {FORMAT_VERSION})"
        )
    cfg = DecoderConfig.from_dict(payload["decoder_config"])
    if config_hash(cfg) != payload["decoder_config_hash"]:
        raise ConfigurationError("decoder config hash mismatch: corrupted checkpoint")
    decoder, _ = init_decoder(cfg)
    decoder.load_state_dict(payload["decoder_state"])
    decoder.eval()
    meta = dict(payload["backbone_meta"])
    meta.pop("interpolation_kernel", None)
    backbone_config = BackboneConfig(**meta)
    if backbone_metadata_hash(backbone_config) != payload["backbone_meta_hash"]:
        raise ConfigurationError("backbone metadata hash mismatch: corrupted checkpoint")
    return decoder, backbone_config, payload
