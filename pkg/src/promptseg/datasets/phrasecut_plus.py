"""Dataset extension: visual support pairs, negatives, phrase prefixes,
and object-aware random cropping."""

import logging
from collections import defaultdict

import numpy as np

from ..errors import InputError

log = logging.getLogger(__name__)

DEFAULT_PREFIXES = ("", "a photo of a ", "a photograph of a ", "an image of a ")


def build_phrasecut_plus(records, q_neg, rng):
    """Extend records with support pairs and negatives.

    Per record: with probability q_neg the phrase is swapped for another
    record's phrase (one naming no object present in this image) and the
    record becomes a negative; otherwise a support sample sharing the
    phrase is drawn uniformly (none when the phrase is unique). Negatives
    never carry supports.
    """
    records = list(records)
    if not records:
        raise InputError("cannot extend an empty record list")
    if not 0.0 <= q_neg < 1.0:
        raise InputError(f"q_neg must be in [0, 1), got {q_neg}")

    by_phrase = defaultdict(list)
    phrases_in_image = defaultdict(set)
    for i, rec in enumerate(records):
        by_phrase[rec.phrase].append(i)
        phrases_in_image[rec.image].add(rec.phrase)
    all_phrases = sorted({rec.phrase for rec in records})

    out = []
    for i, rec in enumerate(records):
        if rng.uniform() < q_neg:
            # a replacement phrase must name nothing present in this image
            candidates = [p for p in all_phrases if p not in phrases_in_image[rec.image]]
            if not candidates:
                log.warning(
                    "record %d: every known phrase matches this image; kept positive", i
                )
            else:
                out.append(rec.as_negative(candidates[int(rng.integers(len(candidates)))]))
                continue
        peers = [j for j in by_phrase[rec.phrase] if j != i]
        if peers:
            support = records[peers[int(rng.integers(len(peers)))]]
            out.append(rec.with_support(support))
        else:
            out.append(rec)  # unique phrase: text prompt only
    return out


def augment_phrase(phrase, rng, prefixes=DEFAULT_PREFIXES):
    """Prepend one prefix from the fixed registry, chosen uniformly."""
    if not phrase:
        raise InputError("cannot augment an empty phrase")
    return prefixes[int(rng.integers(len(prefixes)))] + phrase


def object_aware_crop(image, mask, crop_hw, rng, min_object_fraction=0.2, max_tries=100):
    """Random crop keeping at least ``min_object_fraction`` of the object.

    Negatives (empty masks) crop unconstrained. When no sampled window
    satisfies the constraint the crop centers on the object with a warning.
    """
    img = np.asarray(image)
    m = np.asarray(mask).astype(bool)
    if m.shape != img.shape[:2]:
        raise InputError(f"mask shape {m.shape} does not match image {img.shape[:2]}")
    ch, cw = crop_hw
    h, w = m.shape
    if ch > h or cw > w:
        raise InputError(f"crop {crop_hw} larger than image {(h, w)}")

    def window(r0, c0):
        return img[r0 : r0 + ch, c0 : c0 + cw], m[r0 : r0 + ch, c0 : c0 + cw]

    total = int(m.sum())
    if total == 0:
        r0 = int(rng.integers(0, h - ch + 1))
        c0 = int(rng.integers(0, w - cw + 1))
        return window(r0, c0)

    needed = min_object_fraction * total
    for _ in range(max_tries):
        r0 = int(rng.integers(0, h - ch + 1))
        c0 = int(rng.integers(0, w - cw + 1))
        if m[r0 : r0 + ch, c0 : c0 + cw].sum() >= needed:
            return window(r0, c0)

    # center the window on the object centroid, clipped to the image
    rows, cols = np.nonzero(m)
    r0 = int(np.clip(int(rows.mean()) - ch // 2, 0, h - ch))
    c0 = int(np.clip(int(cols.mean()) - cw // 2, 0, w - cw))
    log.warning(
        "object-aware crop fell back to centering (object too large or unlucky draws)"
    )
    return window(r0, c0)
