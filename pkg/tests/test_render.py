import numpy as np
import pytest

from promptseg.errors import InputError
from promptseg.render import render_overlay, render_probability_heat


def test_overlay_blends_only_masked_pixels():
    image = np.full((8, 8, 3), 100, dtype=np.uint8)
    mask = np.zeros((8, 8), dtype=bool)
    mask[2:5, 2:5] = True
    out = render_overlay(image, mask, color=(200, 0, 0), opacity=0.5)
    assert np.array_equal(out[~mask], image[~mask])
    assert (out[mask][:, 0] == 150).all()
    assert (out[mask][:, 1] == 50).all()


def test_overlay_validation():
    image = np.zeros((4, 4, 3), dtype=np.uint8)
    with pytest.raises(InputError):
        render_overlay(image, np.zeros((2, 2), dtype=bool))
    with pytest.raises(InputError):
        render_overlay(image, np.zeros((4, 4), dtype=bool), opacity=1.5)


def test_probability_heat_strength_scales():
    image = np.full((4, 4, 3), 100, dtype=np.uint8)
    probs = np.zeros((4, 4))
    probs[0, 0] = 1.0
    probs[1, 1] = 0.2
    out = render_probability_heat(image, probs)
    assert out[0, 0, 0] > out[1, 1, 0] > out[2, 2, 0] == 100
