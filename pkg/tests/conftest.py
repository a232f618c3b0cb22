import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_image(rng, h, w):
    """Structured random uint8 scene: gradients + noise, not pure static."""
    yy, xx = np.mgrid[0:h, 0:w]
    base = np.stack([
        120 + 80 * np.sin(2 * np.pi * xx / max(w, 1) * 2),
        120 + 80 * np.cos(2 * np.pi * yy / max(h, 1) * 3),
        (xx + yy) % 255,
    ], axis=-1)
    noise = rng.normal(0, 18, size=(h, w, 3))
    return np.clip(base + noise, 0, 255).astype(np.uint8)
