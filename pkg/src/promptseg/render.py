"""Qualitative overlay rendering: blend a predicted mask over the image."""

import numpy as np

from .errors import InputError


def render_overlay(image, mask, color=(255, 60, 40), opacity=0.5):
    """RGB uint8 copy of the image with masked pixels blended toward
    ``color``; the usual qualitative-figure view of a prediction."""
    img = np.asarray(image)
    m = np.asarray(mask).astype(bool)
    if img.ndim != 3 or img.shape[2] != 3:
        raise InputError(f"expected an H x W x 3 image, got {img.shape}")
    if m.shape != img.shape[:2]:
        raise InputError(f"mask shape {m.shape} does not match image {img.shape[:2]}")
    if not 0.0 <= opacity <= 1.0:
        raise InputError(f"opacity must be in [0, 1], got {opacity}")
    out = img.astype(np.float64).copy()
    out[m] = opacity * np.asarray(color, dtype=np.float64) + (1.0 - opacity) * out[m]
    return np.rint(out).astype(np.uint8)


def render_probability_heat(image, probabilities, color=(255, 0, 0), opacity=0.6):
    """Tint the image toward ``color`` with strength proportional to the
    prediction probability (stronger prediction, stronger tint)."""
    img = np.asarray(image)
    p = np.clip(np.asarray(probabilities, dtype=np.float64), 0.0, 1.0)
    if p.shape != img.shape[:2]:
        raise InputError(f"probability shape {p.shape} does not match image {img.shape[:2]}")
    alpha = opacity * p[..., None]
    out = alpha * np.asarray(color, dtype=np.float64) + (1.0 - alpha) * img.astype(np.float64)
    return np.rint(out).astype(np.uint8)
