"""Produce the conditional vector that tells the decoder what to segment.

The vector lives in the backbone's joint embedding space and can come from
a text prompt, an engineered visual prompt, or a linear interpolation of
both; the decoder never learns which modality produced it.
"""

import json
from dataclasses import dataclass, field

import numpy as np
import torch

from .errors import DegenerateMaskError, InputError
from .visual_prompts import compose_prompt, get_recipe, highlighted_embedding


@dataclass
class ConditionalVector:
    """Point in the joint embedding space, plus where it came from."""

    values: torch.Tensor
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        v = torch.as_tensor(self.values)
        if v.ndim != 1:
            raise InputError(f"conditional vector must be 1-D, got shape {tuple(v.shape)}")
        if not torch.isfinite(v).all():
            raise InputError("conditional vector contains non-finite entries")
        self.values = v

    @property
    def dim(self):
        return self.values.shape[0]


@dataclass
class PromptSpec:
    """A segmentation target: text, visual support pair, or a mixture."""

    kind: str
    text: str | None = None
    support_image: object = None  # path or H x W x 3 array
    support_mask: object = None  # path or H x W binary array
    recipe: str | None = None
    weight: float | None = None  # interpolation weight a

    def __post_init__(self):
        if self.kind not in ("text", "visual", "interpolated"):
            raise InputError(f"unknown prompt kind {self.kind!r}")
        if self.kind in ("text", "interpolated") and not self.text:
            raise InputError(f"kind {self.kind!r} requires a text prompt")
        if self.kind in ("visual", "interpolated"):
            if self.support_image is None or self.support_mask is None:
                raise InputError(f"kind {self.kind!r} requires a support image and mask")
        if self.kind == "interpolated":
            if self.weight is None or not 0.0 <= self.weight <= 1.0:
                raise InputError("interpolated prompts need a weight a in [0, 1]")

    def to_json(self):
        support = None
        if self.support_image is not None:
            support = {
                "image": self.support_image if isinstance(self.support_image, str) else None,
                "mask": self.support_mask if isinstance(self.support_mask, str) else None,
                "recipe": self.recipe,
            }
        return json.dumps(
            {"kind": self.kind, "text": self.text, "support": support, "a": self.weight}
        )

    @classmethod
    def from_json(cls, blob):
        d = json.loads(blob)
        support = d.get("support") or {}
        return cls(
            kind=d["kind"],
            text=d.get("text"),
            support_image=support.get("image"),
            support_mask=support.get("mask"),
            recipe=support.get("recipe"),
            weight=d.get("a"),
        )


def condition_from_text(backbone, prompt):
    """Text-side conditional; identical to the backbone text embedding."""
    values = backbone.encode_text(prompt)
    return ConditionalVector(values, {"kind": "text", "text": prompt})


def condition_from_visual(backbone, support_image, support_mask, recipe_id, crop_output_size=None):
    """Visual-side conditional: encode the engineered prompt image."""
    img = np.asarray(support_image)
    m = np.asarray(support_mask)
    if m.shape != img.shape[:2]:
        raise InputError(f"mask shape {m.shape} does not match image {img.shape[:2]}")
    if not (m != 0).any():
        raise DegenerateMaskError("support mask is empty")
    values = highlighted_embedding(
        backbone, img, m, recipe_id, crop_output_size=crop_output_size
    )
    return ConditionalVector(values, {"kind": "visual", "recipe": recipe_id})


def interpolate(s, t, a):
    """Elementwise a*s + (1-a)*t between a support-image conditional s and
    a text conditional t; endpoints reproduce the inputs bitwise."""
    if not 0.0 <= a <= 1.0:
        raise InputError(f"interpolation weight must be in [0, 1], got {a}")
    if s.dim != t.dim:
        raise InputError(f"dimension mismatch: {s.dim} vs {t.dim}")
    provenance = {"kind": "interpolated", "a": float(a), "s": s.provenance, "t": t.provenance}
    if a == 0.0:
        return ConditionalVector(t.values.clone(), provenance)
    if a == 1.0:
        return ConditionalVector(s.values.clone(), provenance)
    return ConditionalVector(a * s.values + (1.0 - a) * t.values, provenance)


def sample_interpolation_weight(rng):
    """Uniform draw on [0, 1] from a seeded numpy Generator."""
    return float(rng.uniform(0.0, 1.0))


def conditional_from_spec(backbone, spec, rng=None, crop_output_size=None):
    """Resolve a PromptSpec (with in-memory arrays) to a conditional vector."""
    if spec.kind == "text":
        return condition_from_text(backbone, spec.text)
    visual = condition_from_visual(
        backbone,
        spec.support_image,
        spec.support_mask,
        spec.recipe or "best",
        crop_output_size=crop_output_size,
    )
    if spec.kind == "visual":
        return visual
    a = spec.weight
    if a is None:
        if rng is None:
            raise InputError("interpolated prompt without a weight needs an rng")
        a = sample_interpolation_weight(rng)
    return interpolate(visual, condition_from_text(backbone, spec.text), a)


__all__ = [
    "ConditionalVector",
    "PromptSpec",
    "condition_from_text",
    "condition_from_visual",
    "conditional_from_spec",
    "interpolate",
    "sample_interpolation_weight",
    "compose_prompt",
    "get_recipe",
]
