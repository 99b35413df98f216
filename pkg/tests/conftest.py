import numpy as np
import pytest
from hypothesis import settings

from plumedt.raster import Scene
from plumedt.synthgen import generate_dataset

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_dataset():
    """Six 96x96 labeled scenes, shared read-only across tests."""
    return generate_dataset(6, base_seed=5, dims=(96, 96))


def make_scene(bands, label=None, scene_id="t"):
    bands = np.asarray(bands, dtype=np.uint16)
    return Scene(scene_id, bands, label)


def bar_mask(h, w, y0, y1, x0, x1):
    m = np.zeros((h, w), dtype=bool)
    m[y0:y1, x0:x1] = True
    return m
