"""Conditional segmentation decoder and its checkpoint format."""

from .checkpoint import load_checkpoint, save_checkpoint
from .model import (
    PAPER_PARAM_TARGET,
    DeconvDecoder,
    DecoderConfig,
    FiLMLayer,
    SegmentationDecoder,
    SegmentationLogits,
    config_hash,
    init_decoder,
    parameter_report,
    segment_logits,
)

__all__ = [
    "DeconvDecoder",
    "DecoderConfig",
    "FiLMLayer",
    "PAPER_PARAM_TARGET",
    "SegmentationDecoder",
    "SegmentationLogits",
    "config_hash",
    "init_decoder",
    "load_checkpoint",
    "parameter_report",
    "save_checkpoint",
    "segment_logits",
]
