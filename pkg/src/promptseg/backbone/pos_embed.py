"""Positional-embedding resampling for variable image sizes."""

import math

import torch
import torch.nn.functional as F

from ..errors import InputError


def interpolate_positional_embeddings(trained, target_grid):
    """Resample a (1 + G*G, D) positional table to (1 + gh*gw, D).

    The CLS row is copied unchanged; patch rows are resampled bilinearly
    from the trained G x G grid. Native-size requests return the input
    untouched (exact identity).
    """
    gh, gw = int(target_grid[0]), int(target_grid[1])
    if gh < 1 or gw < 1:
        raise InputError(f"target grid must have positive sides, got {(gh, gw)}")
    rows = trained.shape[0]
    g = int(math.isqrt(rows - 1))
    if g < 1 or 1 + g * g != rows:
        raise InputError(
            f"trained table has {rows} rows; expected 1 + G*G for a square grid"
        )
    if (gh, gw) == (g, g):
        return trained
    cls_row = trained[:1]
    patches = trained[1:].reshape(g, g, -1).permute(2, 0, 1).unsqueeze(0)
    resampled = F.interpolate(
        patches, size=(gh, gw), mode="bilinear", align_corners=False
    )
    resampled = resampled.squeeze(0).permute(1, 2, 0).reshape(gh * gw, -1)
    return torch.cat([cls_row, resampled], dim=0)
