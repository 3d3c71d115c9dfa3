"""Frozen dual-encoder feature extractor with intermediate readout."""

from .config import INTERPOLATION_KERNEL, AttentionMaskPolicy, BackboneConfig, tiny_config
from .io import (
    backbone_metadata_hash,
    build_backbone,
    load_backbone,
    parameter_checksum,
    save_backbone,
)
from .masking import apply_attention_mask, attention_bias, patch_grid_mask
from .pos_embed import interpolate_positional_embeddings
from .vit import ActivationReadout, DualEncoderBackbone

__all__ = [
    "ActivationReadout",
    "AttentionMaskPolicy",
    "BackboneConfig",
    "DualEncoderBackbone",
    "INTERPOLATION_KERNEL",
    "apply_attention_mask",
    "attention_bias",
    "backbone_metadata_hash",
    "build_backbone",
    "interpolate_positional_embeddings",
    "load_backbone",
    "parameter_checksum",
    "patch_grid_mask",
    "save_backbone",
    "tiny_config",
]
