"""Backbone configuration and attention-mask policies."""

from dataclasses import dataclass, field, asdict

import numpy as np

from ..errors import ConfigurationError, DegenerateMaskError, InputError

VARIANTS = ("pretrained-dual-encoder", "stand-in-random", "imagenet-vit-stand-in")

INTERPOLATION_KERNEL = "bilinear"


@dataclass(frozen=True)
class BackboneConfig:
    """Shape and identity of the frozen dual encoder.

    ``trained_grid * patch_size`` is the native training image side; inputs
    at other (patch-aligned) sizes get interpolated positional embeddings.
    """

    variant: str = "stand-in-random"
    patch_size: int = 16
    token_width: int = 768  # per-token width of the visual transformer
    embed_width: int = 512  # joint image/text embedding width
    num_layers: int = 12
    trained_grid: int = 14
    heads: int = 12
    seed: int = 0
    text_layers: int = 4
    text_width: int = 512
    text_heads: int = 8
    vocab_size: int = 4096
    max_text_tokens: int = 77

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                f"unknown backbone variant {self.variant!r}; expected one of {VARIANTS}"
            )
        if self.patch_size <= 0:
            raise ConfigurationError("patch_size must be positive")
        if self.trained_grid < 1:
            raise ConfigurationError("trained_grid must be >= 1")
        if self.num_layers < 1:
            raise ConfigurationError("num_layers must be >= 1")
        if self.token_width % self.heads != 0:
            raise ConfigurationError("token_width must divide evenly among heads")

    @property
    def native_image_size(self):
        return self.trained_grid * self.patch_size

    def metadata(self):
        """JSON-ready sidecar contents written next to checkpoints."""
        meta = asdict(self)
        meta["interpolation_kernel"] = INTERPOLATION_KERNEL
        return meta


def tiny_config(**overrides):
    """Small stand-in used by fast tests; same interface as the default."""
    base = dict(
        variant="stand-in-random",
        patch_size=16,
        token_width=96,
        embed_width=64,
        num_layers=4,
        trained_grid=4,
        heads=4,
        text_layers=2,
        text_width=64,
        text_heads=4,
    )
    base.update(overrides)
    return BackboneConfig(**base)


MASK_MODES = ("none", "cls-only-layer-k", "cls-only-all-layers", "all-tokens-all-layers")


@dataclass(frozen=True)
class AttentionMaskPolicy:
    """Restrict token interactions to a patch-grid mask at chosen layers.

    ``mask`` is a binary (grid_h, grid_w) map over patch tokens; it is
    ignored for mode "none".
    """

    mode: str = "none"
    mask: np.ndarray | None = field(default=None)
    layer: int | None = None

    def __post_init__(self):
        if self.mode not in MASK_MODES:
            raise ConfigurationError(
                f"unknown attention mask mode {self.mode!r}; expected one of {MASK_MODES}"
            )
        if self.mode == "none":
            return
        if self.mask is None:
            raise InputError(f"mode {self.mode!r} requires a patch-grid mask")
        m = np.asarray(self.mask)
        if m.ndim != 2:
            raise InputError("attention mask must be a 2-D patch-grid map")
        if not np.isin(np.unique(m), (0, 1)).all():
            raise InputError("attention mask must be binary")
        if not m.any():
            raise DegenerateMaskError("all-zero attention mask: CLS would attend to nothing")
        if self.mode == "cls-only-layer-k" and self.layer is None:
            raise ConfigurationError("mode cls-only-layer-k requires a layer index")
        object.__setattr__(self, "mask", m.astype(bool))

    def applies_at(self, layer):
        if self.mode == "none":
            return False
        if self.mode == "cls-only-layer-k":
            return layer == self.layer
        return True
