import numpy as np
import pytest

from qtemplate.image_io import BinaryImage


@pytest.fixture(scope="session")
def letter_a_64():
    from qtemplate.fixtures import load_fixture

    return load_fixture("A_64")


@pytest.fixture(scope="session")
def letter_b_64():
    from qtemplate.fixtures import load_fixture

    return load_fixture("B_64")


def random_image(width, height, seed, fill=0.5):
    """Random image guaranteed to contain at least one point."""
    rng = np.random.default_rng(seed)
    pixels = rng.random((height, width)) < fill
    if not pixels.any():
        pixels[0, 0] = True
    return BinaryImage(pixels)
