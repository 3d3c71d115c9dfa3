"""Desk-scale synthetic dataset: colored geometric shapes with a closed
phrase vocabulary, so support sampling and negatives are exercised."""

from pathlib import Path

import cv2
import numpy as np

from ..errors import InputError
from .records import LoadedSample, SampleRecord, write_records

COLORS = {
    "red": (220, 40, 40),
    "green": (40, 190, 60),
    "blue": (50, 80, 220),
    "yellow": (230, 210, 40),
}
SHAPES = ("circle", "square", "triangle")

PHRASE_VOCAB = tuple(f"{c} {s}" for c in COLORS for s in SHAPES)


def _draw_sample(rng, image_size):
    color_name = list(COLORS)[rng.integers(len(COLORS))]
    shape = SHAPES[rng.integers(len(SHAPES))]
    color = COLORS[color_name]

    image = np.full((image_size, image_size, 3), 40, dtype=np.uint8)
    noise = rng.integers(0, 30, size=image.shape, dtype=np.uint8)
    image = (image + noise).astype(np.uint8)
    mask = np.zeros((image_size, image_size), dtype=np.uint8)

    margin = image_size // 4
    cx = int(rng.integers(margin, image_size - margin))
    cy = int(rng.integers(margin, image_size - margin))
    r = int(rng.integers(image_size // 8, image_size // 4))

    if shape == "circle":
        cv2.circle(mask, (cx, cy), r, 1, -1)
    elif shape == "square":
        cv2.rectangle(mask, (cx - r, cy - r), (cx + r, cy + r), 1, -1)
    else:
        pts = np.array([[cx, cy - r], [cx - r, cy + r], [cx + r, cy + r]])
        cv2.fillPoly(mask, [pts], 1)
    mask = np.clip(mask, 0, 1)
    image[mask.astype(bool)] = color
    return image, mask.astype(bool), f"{color_name} {shape}"


def synth_samples(seed, n, image_size=64):
    """In-memory samples; deterministic per seed."""
    if n < 1:
        raise InputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return [
        LoadedSample(image=img, phrase=phrase, mask=mask)
        for img, mask, phrase in (_draw_sample(rng, image_size) for _ in range(n))
    ]


def synth_dataset(out_dir, n, seed=0, image_size=64):
    """Write images, masks, and the JSON-lines index; returns the records."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples = synth_samples(seed, n, image_size)
    records = []
    for i, s in enumerate(samples):
        img_name = f"img_{i:05d}.png"
        mask_name = f"mask_{i:05d}.png"
        cv2.imwrite(str(out_dir / img_name), cv2.cvtColor(s.image, cv2.COLOR_RGB2BGR))
        cv2.imwrite(str(out_dir / mask_name), s.mask.astype(np.uint8) * 255)
        records.append(SampleRecord(image=img_name, phrase=s.phrase, mask=mask_name))
    write_records(records, out_dir / "index.jsonl")
    return records
