"""Backbone + decoder bundle: the deployable segmentation model."""

import hashlib

from .backbone import backbone_metadata_hash, build_backbone, parameter_checksum
from .conditioning import ConditionalVector, conditional_from_spec
from .decoder import load_checkpoint, save_checkpoint, segment_logits
from .errors import ConfigurationError


class PromptSegModel:
    """Frozen backbone plus trained decoder behind one segmentation call."""

    def __init__(self, backbone, decoder):
        bc, dc = backbone.config, decoder.config
        if dc.patch_size != bc.patch_size:
            raise ConfigurationError("decoder and backbone disagree on patch size")
        if dc.backbone_token_width != bc.token_width:
            raise ConfigurationError("decoder and backbone disagree on token width")
        if dc.embed_width != bc.embed_width:
            raise ConfigurationError("decoder and backbone disagree on embedding width")
        max_layer = max(dc.readout_layers)
        if max_layer >= bc.num_layers:
            raise ConfigurationError(
                f"decoder reads layer {max_layer} but the backbone has {bc.num_layers}"
            )
        self.backbone = backbone
        self.decoder = decoder

    def readout(self, image):
        return self.backbone.encode_image(
            image, readout_layers=self.decoder.config.readout_layers
        )

    def conditional(self, spec, rng=None):
        if isinstance(spec, ConditionalVector):
            return spec
        return conditional_from_spec(
            self.backbone, spec, rng=rng,
            crop_output_size=self.backbone.config.native_image_size,
        )

    def segment(self, image, spec, rng=None):
        """SegmentationLogits at query resolution for a prompt spec (or a
        ready-made conditional vector)."""
        cond = self.conditional(spec, rng=rng)
        return segment_logits(self.decoder, self.readout(image), cond)

    @property
    def model_hash(self):
        h = hashlib.sha256()
        h.update(backbone_metadata_hash(self.backbone.config).encode())
        h.update(parameter_checksum(self.decoder).encode())
        return h.hexdigest()


def save_model(path, model, extra=None):
    return save_checkpoint(path, model.decoder, model.backbone.config, extra=extra)


def load_model(path, backbone_weights=None):
    """Rebuild the bundle from a checkpoint; stand-in backbones reconstruct
    from their metadata (seeded), the pretrained variant needs weights."""
    decoder, backbone_config, payload = load_checkpoint(path)
    backbone = build_backbone(backbone_config, weights_path=backbone_weights)
    return PromptSegModel(backbone, decoder), payload
