"""Frozen dual encoder: visual transformer + text transformer.

The pretrained variant loads weights from disk; the stand-in variants are
seeded random networks with the identical interface, used wherever real
weights are unavailable (tests, desk-scale runs). All variants are frozen:
parameters never receive gradients and never change after construction.
"""

import logging
import re
import zlib
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn

from ..errors import ConfigurationError, InputError, SizingError
from .config import BackboneConfig
from .masking import attention_bias
from .pos_embed import interpolate_positional_embeddings

log = logging.getLogger(__name__)

IMAGE_MEAN = 0.5
IMAGE_STD = 0.5


@dataclass
class ActivationReadout:
    """Ordered per-layer token matrices plus the final joint-space embedding.

    Each entry of ``layers`` is a (1 + grid_h*grid_w, token_width) tensor
    with the CLS token first, taken at the post-block output of the
    requested (0-indexed) layer.
    """

    layers: list
    image_embedding: torch.Tensor
    grid: tuple
    readout_layers: tuple

    @property
    def token_count(self):
        return 1 + self.grid[0] * self.grid[1]


class SelfAttention(nn.Module):
    def __init__(self, dim, heads):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)

    def forward(self, x, bias=None):
        b, t, d = x.shape
        qkv = self.qkv(x).reshape(b, t, 3, self.heads, self.head_dim)
        q, k, v = qkv.permute(2, 0, 3, 1, 4)  # (b, heads, t, head_dim) each
        scores = q @ k.transpose(-2, -1) / self.head_dim**0.5
        if bias is not None:
            scores = scores + bias  # (t, t) broadcast over batch and heads
        attn = scores.softmax(dim=-1)
        out = (attn @ v).transpose(1, 2).reshape(b, t, d)
        return self.proj(out)


class TransformerBlock(nn.Module):
    """Pre-norm block: x + attn(ln(x)), then x + mlp(ln(x))."""

    def __init__(self, dim, heads, mlp_ratio=4):
        super().__init__()
        self.ln1 = nn.LayerNorm(dim)
        self.attn = SelfAttention(dim, heads)
        self.ln2 = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(
            nn.Linear(dim, mlp_ratio * dim),
            nn.GELU(),
            nn.Linear(mlp_ratio * dim, dim),
        )

    def forward(self, x, bias=None):
        x = x + self.attn(self.ln1(x), bias)
        return x + self.mlp(self.ln2(x))


class VisualTransformer(nn.Module):
    def __init__(self, cfg: BackboneConfig):
        super().__init__()
        self.cfg = cfg
        d = cfg.token_width
        self.patch_embed = nn.Conv2d(3, d, cfg.patch_size, stride=cfg.patch_size)
        self.cls_token = nn.Parameter(torch.zeros(1, 1, d))
        self.pos_embed = nn.Parameter(torch.zeros(1 + cfg.trained_grid**2, d))
        self.blocks = nn.ModuleList(
            TransformerBlock(d, cfg.heads) for _ in range(cfg.num_layers)
        )
        self.ln_post = nn.LayerNorm(d)
        self.proj = nn.Linear(d, cfg.embed_width, bias=False)

    def forward_collect(self, pixels, collect, policy=None):
        """Run all blocks; return ({layer: tokens}, image_embedding).

        ``pixels``: (b, 3, H, W) normalized; token matrices come back as
        (b, 1 + gh*gw, token_width) at the post-block output of each
        requested 0-indexed layer.
        """
        b = pixels.shape[0]
        gh = pixels.shape[2] // self.cfg.patch_size
        gw = pixels.shape[3] // self.cfg.patch_size
        x = self.patch_embed(pixels).flatten(2).transpose(1, 2)  # (b, gh*gw, d)
        x = torch.cat([self.cls_token.expand(b, -1, -1), x], dim=1)
        x = x + interpolate_positional_embeddings(self.pos_embed, (gh, gw))
        outputs = {}
        for i, block in enumerate(self.blocks):
            bias = attention_bias(policy, (gh, gw), i, dtype=x.dtype)
            x = block(x, bias)
            if i in collect:
                outputs[i] = x
        x = self.ln_post(x)
        embedding = self.proj(x[:, 0])
        return outputs, embedding


class TextTransformer(nn.Module):
    def __init__(self, cfg: BackboneConfig):
        super().__init__()
        self.cfg = cfg
        w = cfg.text_width
        # vocab buckets + BOS + EOS
        self.token_embed = nn.Embedding(cfg.vocab_size + 2, w)
        self.pos_embed = nn.Parameter(torch.zeros(cfg.max_text_tokens, w))
        self.blocks = nn.ModuleList(
            TransformerBlock(w, cfg.text_heads) for _ in range(cfg.text_layers)
        )
        self.ln_final = nn.LayerNorm(w)
        self.proj = nn.Linear(w, cfg.embed_width, bias=False)

    def forward(self, ids):
        x = self.token_embed(ids).unsqueeze(0)
        x = x + self.pos_embed[: ids.shape[0]]
        for block in self.blocks:
            x = block(x)
        x = self.ln_final(x)
        return self.proj(x[0, -1])  # read out at the EOS position


def _hash_token(token, vocab_size):
    return zlib.crc32(token.encode("utf-8")) % vocab_size


class DualEncoderBackbone(nn.Module):
    """Frozen image/text feature extractor with intermediate readout."""

    def __init__(self, config: BackboneConfig):
        super().__init__()
        self.config = config
        self.visual = VisualTransformer(config)
        self.text = TextTransformer(config)
        self._init_weights()
        self.requires_grad_(False)
        self.eval()

    def _init_weights(self):
        salt = zlib.crc32(self.config.variant.encode("utf-8"))
        gen = torch.Generator().manual_seed((self.config.seed + salt) % 2**63)
        with torch.no_grad():
            for _, m in sorted(self.named_modules()):
                if isinstance(m, nn.LayerNorm):
                    m.weight.fill_(1.0)
                    m.bias.zero_()
                elif isinstance(m, (nn.Linear, nn.Conv2d, nn.Embedding)):
                    m.weight.copy_(torch.randn(m.weight.shape, generator=gen) * 0.02)
                    if getattr(m, "bias", None) is not None:
                        m.bias.zero_()
            for p in (self.visual.cls_token, self.visual.pos_embed, self.text.pos_embed):
                p.copy_(torch.randn(p.shape, generator=gen) * 0.02)
            for proj in (self.visual.proj, self.text.proj):
                scale = proj.weight.shape[1] ** -0.5
                proj.weight.copy_(torch.randn(proj.weight.shape, generator=gen) * scale)

    # ------------------------------------------------------------- images

    def _validate_image(self, image):
        arr = np.asarray(image)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise InputError(f"expected an H x W x 3 RGB image, got shape {arr.shape}")
        h, w = arr.shape[:2]
        p = self.config.patch_size
        if h % p or w % p:
            raise SizingError(
                f"image size {(h, w)} is not divisible by the patch size {p}"
            )
        return arr, (h // p, w // p)

    def _pixels(self, arr):
        x = torch.from_numpy(np.ascontiguousarray(arr)).float()
        if arr.dtype == np.uint8:
            x = x / 255.0
        x = (x - IMAGE_MEAN) / IMAGE_STD
        return x.permute(2, 0, 1).unsqueeze(0)

    def encode_image(self, image, readout_layers=(3, 7, 9), policy=None):
        """Extract token matrices at ``readout_layers`` plus the final
        joint-space image embedding. Weights are never mutated."""
        arr, grid = self._validate_image(image)
        layers = tuple(int(i) for i in readout_layers)
        for i in layers:
            if not 0 <= i < self.config.num_layers:
                raise ConfigurationError(
                    f"readout layer {i} out of range for a "
                    f"{self.config.num_layers}-layer backbone"
                )
        with torch.no_grad():
            outputs, embedding = self.visual.forward_collect(
                self._pixels(arr), set(layers), policy
            )
        return ActivationReadout(
            layers=[outputs[i][0] for i in layers],
            image_embedding=embedding[0],
            grid=grid,
            readout_layers=layers,
        )

    # --------------------------------------------------------------- text

    def tokenize(self, prompt):
        if not isinstance(prompt, str) or not prompt.strip():
            raise InputError("text prompt must be a non-empty string")
        words = re.findall(r"[a-z0-9]+", prompt.lower())
        if not words:
            raise InputError(f"prompt {prompt!r} contains no tokenizable words")
        budget = self.config.max_text_tokens - 2
        if len(words) > budget:
            log.warning(
                "prompt of %d tokens exceeds the %d-token window; truncating",
                len(words),
                budget,
            )
            words = words[:budget]
        bos = self.config.vocab_size
        eos = self.config.vocab_size + 1
        ids = [bos] + [_hash_token(t, self.config.vocab_size) for t in words] + [eos]
        return torch.tensor(ids, dtype=torch.long)

    def encode_text(self, prompt):
        """Joint-space embedding of a text prompt; deterministic."""
        ids = self.tokenize(prompt)
        with torch.no_grad():
            return self.text(ids)
