"""Attention-score masking for CLIP-style mask injection."""

import numpy as np
import torch

from ..errors import InputError
from .config import AttentionMaskPolicy


def attention_bias(policy, grid, layer, dtype=torch.float32):
    """Additive (T, T) bias implementing the policy at this layer.

    Returns None when the policy does not apply. Disallowed key columns
    get -inf so they vanish under softmax.
    """
    if policy is None or not policy.applies_at(layer):
        return None
    gh, gw = grid
    if policy.mask.shape != (gh, gw):
        raise InputError(
            f"attention mask grid {policy.mask.shape} does not match token grid {(gh, gw)}"
        )
    flat = policy.mask.reshape(-1)
    t = 1 + flat.size
    allowed_keys = np.r_[True, flat]  # CLS column always allowed
    bias = torch.zeros((t, t), dtype=dtype)
    neg = torch.tensor(float("-inf"), dtype=dtype)
    blocked = torch.from_numpy(~allowed_keys)
    if policy.mode.startswith("cls-only"):
        bias[0, blocked] = neg  # only the CLS query row is restricted
    else:
        bias[:, blocked] = neg  # every query restricted to mask + CLS keys
    return bias


def apply_attention_mask(policy, scores, grid, layer):
    """Mask pre-softmax attention scores (..., T, T) per the policy."""
    bias = attention_bias(policy, grid, layer, dtype=scores.dtype)
    if bias is None:
        return scores
    return scores + bias


def patch_grid_mask(mask, patch_size):
    """Downsample a pixel mask to the patch grid (patch is on iff it
    contains any foreground pixel)."""
    m = np.asarray(mask).astype(bool)
    h, w = m.shape
    if h % patch_size or w % patch_size:
        raise InputError(
            f"mask size {(h, w)} not divisible by patch size {patch_size}"
        )
    gh, gw = h // patch_size, w // patch_size
    return m.reshape(gh, patch_size, gw, patch_size).any(axis=(1, 3))


__all__ = ["AttentionMaskPolicy", "apply_attention_mask", "attention_bias", "patch_grid_mask"]
