"""Compose (image, mask) pairs into engineered prompt images.

Steps are applied in recipe order. Background steps (intensity, blur)
preserve foreground pixels bitwise; crop steps cut to the mask bounding
box and resize to the model input size.
"""

from dataclasses import dataclass, field

import cv2
import numpy as np

from ..errors import ConfigurationError, DegenerateMaskError, InputError


@dataclass(frozen=True)
class BgIntensity:
    """Multiply background RGB by alpha in [0, 1]; foreground untouched."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InputError(f"bg_intensity alpha must be in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class BgBlur:
    """Gaussian-filter the background, composite the foreground over it."""

    sigma: float = 10.0


@dataclass(frozen=True)
class Crop:
    """Cut to the mask bounding box; "large" dilates the box by 50% per side."""

    context: str = "tight"

    def __post_init__(self):
        if self.context not in ("tight", "large"):
            raise InputError(f"crop context must be tight or large, got {self.context!r}")


@dataclass(frozen=True)
class Outline:
    """Draw a contour of the mask boundary onto the image."""

    color: tuple = (255, 0, 0)
    width: int = 3


@dataclass(frozen=True)
class GrayscaleDye:
    """Grayscale the image and tint the object with a color."""

    color: tuple = (255, 0, 0)


@dataclass(frozen=True)
class CompositionRecipe:
    id: str
    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


def tight_bbox(mask):
    """Inclusive (row0, row1, col0, col1) bounds of the mask foreground."""
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        raise DegenerateMaskError("cannot take the bounding box of an empty mask")
    return int(rows[0]), int(rows[-1]), int(cols[0]), int(cols[-1])


def expand_bbox(box, shape, margin=0.5):
    """Dilate an inclusive box by ``margin`` of its side per side, clipped."""
    r0, r1, c0, c1 = box
    h, w = shape
    dr = int(round((r1 - r0 + 1) * margin))
    dc = int(round((c1 - c0 + 1) * margin))
    return (
        max(0, r0 - dr),
        min(h - 1, r1 + dr),
        max(0, c0 - dc),
        min(w - 1, c1 + dc),
    )


def _validate_pair(image, mask):
    img = np.asarray(image)
    m = np.asarray(mask)
    if img.ndim != 3 or img.shape[2] != 3:
        raise InputError(f"expected an H x W x 3 image, got {img.shape}")
    if m.shape != img.shape[:2]:
        raise InputError(f"mask shape {m.shape} does not match image {img.shape[:2]}")
    if m.dtype != bool:
        vals = np.unique(m)
        if not np.isin(vals, (0, 1)).all():
            raise InputError(f"mask must be binary, found values {vals[:8]}")
        m = m.astype(bool)
    if img.dtype != np.uint8:
        raise InputError(f"expected a uint8 image, got dtype {img.dtype}")
    return img, m


def compose_prompt(image, mask, recipe, crop_output_size=224):
    """Apply the recipe's steps in order; returns the engineered RGB image.

    ``crop_output_size``: side length the image is resized to after a crop
    step (keep it patch-aligned for the encoder).
    """
    img, m = _validate_pair(image, mask)
    out = img.copy()
    for step in recipe.steps:
        if isinstance(step, BgIntensity):
            bg = ~m
            out[bg] = np.rint(out[bg].astype(np.float64) * step.alpha).astype(np.uint8)
        elif isinstance(step, BgBlur):
            blurred = cv2.GaussianBlur(out, (0, 0), step.sigma)
            out = np.where(m[..., None], out, blurred)
        elif isinstance(step, Crop):
            box = tight_bbox(m)
            if step.context == "large":
                box = expand_bbox(box, m.shape)
            r0, r1, c0, c1 = box
            out = out[r0 : r1 + 1, c0 : c1 + 1]
            m = m[r0 : r1 + 1, c0 : c1 + 1]
            size = (crop_output_size, crop_output_size)
            out = cv2.resize(out, size, interpolation=cv2.INTER_LINEAR)
            m = cv2.resize(m.astype(np.uint8), size, interpolation=cv2.INTER_NEAREST).astype(bool)
        elif isinstance(step, Outline):
            contours, _ = cv2.findContours(
                m.astype(np.uint8), cv2.RETR_EXTERNAL, cv2.CHAIN_APPROX_NONE
            )
            out = np.ascontiguousarray(out)
            cv2.drawContours(out, contours, -1, step.color, step.width)
        elif isinstance(step, GrayscaleDye):
            gray = cv2.cvtColor(out, cv2.COLOR_RGB2GRAY)
            out = np.repeat(gray[..., None], 3, axis=2)
            tint = gray[m, None].astype(np.float64) / 255.0 * np.asarray(step.color)
            out[m] = np.rint(tint).astype(np.uint8)
        else:
            raise ConfigurationError(f"unknown composition step {step!r}")
    return np.ascontiguousarray(out)


# ----------------------------------------------------------------- registry

# Image-composition strategies, one per alignment-study row; ids are unique.
_COMPOSITION_RECIPES = [
    CompositionRecipe("original", ()),
    CompositionRecipe("bg_intensity_50", (BgIntensity(0.5),)),
    CompositionRecipe("bg_intensity_10", (BgIntensity(0.1),)),
    CompositionRecipe("bg_intensity_0", (BgIntensity(0.0),)),
    CompositionRecipe("bg_blur", (BgBlur(),)),
    CompositionRecipe("bg_blur_intensity_10", (BgBlur(), BgIntensity(0.1))),
    CompositionRecipe("crop", (Crop("tight"),)),
    CompositionRecipe("crop_large_context", (Crop("large"),)),
    CompositionRecipe("crop_bg_blur", (BgBlur(), Crop("tight"))),
    CompositionRecipe("crop_bg_intensity_10", (BgIntensity(0.1), Crop("tight"))),
    CompositionRecipe(
        "crop_bg_blur_intensity_10", (BgIntensity(0.1), BgBlur(), Crop("tight"))
    ),
    CompositionRecipe("outline_red", (Outline(),)),
    CompositionRecipe("dye_red_grayscale", (GrayscaleDye(),)),
    CompositionRecipe("highlight_mask", (Outline(color=(255, 0, 0), width=5),)),
]

# Attention-masking strategies (mask injected inside the encoder instead of
# composing a new image); resolved to policies against a concrete grid.
ATTENTION_STRATEGIES = {
    "mask_cls_last_layer": ("cls-only-layer-k", "last"),
    "mask_cls_all_layers": ("cls-only-all-layers", None),
    "mask_all_all_layers": ("all-tokens-all-layers", None),
}

# the best-performing combination from the alignment study
BEST_RECIPE_ID = "crop_bg_blur_intensity_10"

_REGISTRY = {}
for _r in _COMPOSITION_RECIPES:
    if _r.id in _REGISTRY:
        raise ConfigurationError(f"duplicate recipe id {_r.id!r}")
    _REGISTRY[_r.id] = _r


def get_recipe(recipe_id):
    if recipe_id == "best":
        recipe_id = BEST_RECIPE_ID
    if recipe_id not in _REGISTRY:
        raise ConfigurationError(
            f"unknown recipe {recipe_id!r}; registered: {sorted(_REGISTRY)}"
        )
    return _REGISTRY[recipe_id]


def registered_recipe_ids():
    return sorted(_REGISTRY)


def registered_strategy_ids():
    """Composition recipes plus in-encoder attention-masking strategies."""
    return sorted(_REGISTRY) + sorted(ATTENTION_STRATEGIES)


def is_attention_strategy(strategy_id):
    return strategy_id in ATTENTION_STRATEGIES
