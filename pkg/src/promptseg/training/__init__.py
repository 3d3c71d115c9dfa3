"""Decoder optimization with a frozen backbone."""

from .loop import TrainConfig, TrainResult, cosine_lr, train

__all__ = ["TrainConfig", "TrainResult", "cosine_lr", "train"]
