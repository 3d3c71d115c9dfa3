"""Generalized-prompt evaluation subsets (affordances, attributes,
meronymy) built from the shipped prompt-to-category mapping."""

import json
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from .records import _read_mask


def load_affordance_mapping():
    with resources.files("promptseg.data").joinpath("affordance_mapping.json").open() as fh:
        return json.load(fh)


@dataclass
class PromptSubset:
    prompt: str
    group: str
    # one entry per image: (image path, list of member mask paths)
    items: list


def affordance_subsets(records, mapping=None, known_categories=None):
    """Per generalized prompt: the images containing any mapped category,
    each paired with the union of the mapped categories' masks.

    ``known_categories``: optional category vocabulary; mapped names
    outside it raise a ConfigurationError listing the offenders.
    """
    if mapping is None:
        mapping = load_affordance_mapping()
    if known_categories is not None:
        known = set(known_categories)
        offenders = sorted(
            {
                cat
                for entry in mapping.values()
                for cat in entry["categories"]
                if cat not in known
            }
        )
        if offenders:
            raise ConfigurationError(
                f"affordance mapping names unknown categories: {offenders}"
            )

    by_image = defaultdict(list)
    for rec in records:
        if not rec.negative:
            by_image[rec.image].append(rec)

    subsets = []
    for prompt, entry in mapping.items():
        categories = set(entry["categories"])
        items = []
        for image, recs in sorted(by_image.items()):
            members = [r.mask for r in recs if r.phrase in categories]
            if members:  # images without any mapped category are excluded
                items.append((image, members))
        subsets.append(PromptSubset(prompt=prompt, group=entry["group"], items=items))
    return subsets


def load_union_mask(mask_paths, root="."):
    """Union of ground-truth masks; the target for a generalized prompt."""
    root = Path(root)
    union = None
    for p in mask_paths:
        m = _read_mask(root / p)
        union = m if union is None else (union | m)
    return union


def union_mask_from_arrays(masks):
    out = np.zeros_like(np.asarray(masks[0], dtype=bool))
    for m in masks:
        out |= np.asarray(m, dtype=bool)
    return out
