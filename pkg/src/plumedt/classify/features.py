"""Per-pixel spectral features."""

from __future__ import annotations

import numpy as np

from plumedt.errors import PlumeInputError
from plumedt.raster import Scene, normalize


def scene_features(scene: Scene) -> np.ndarray:
    """Normalized (red, green, blue, nir) per pixel, shape (h * w, 4), row-major."""
    return normalize(scene).reshape(4, -1).T


def pixel_samples(scenes, max_samples: int | None = None, seed: int = 0):
    """Stack the labeled pixels of `scenes` into ``(X, y)``.

    If `max_samples` is set and smaller than the pixel count, a seeded
    uniform subset (without replacement, original order kept) is returned.
    """
    scenes = list(scenes)
    if not scenes:
        raise PlumeInputError("no training scenes")
    for s in scenes:
        if s.label is None:
            raise PlumeInputError(f"scene {s.id} has no label")
    X = np.concatenate([scene_features(s) for s in scenes])
    y = np.concatenate([s.label.ravel() for s in scenes])
    if max_samples is not None and len(y) > max_samples:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(y), size=max_samples, replace=False))
        X, y = X[keep], y[keep]
    return X, y
