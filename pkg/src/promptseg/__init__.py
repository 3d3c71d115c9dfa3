"""promptseg: prompt-conditioned binary image segmentation.

A frozen dual-encoder backbone (image + text) feeds a lightweight
transformer decoder that is FiLM-conditioned on a joint-space embedding
obtained from a text prompt, an engineered visual prompt, or a linear
interpolation of both.
"""

__version__ = "0.1.0"
