"""
Blue/NIR band-threshold classifier.

A pixel is plume when its normalized blue reflectance is at least
``blue_min`` and its normalized NIR reflectance is at most ``nir_max``:
plumes and clouds are both bright in the visible, but only clouds stay
bright in the near infrared.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from plumedt.errors import PlumeInputError
from plumedt.raster import BLUE, NIR, U16_MAX, Scene

GRID_STEPS = 50  # thresholds are multiples of 1/50 = 0.02


@dataclass(frozen=True)
class BandThreshold:
    blue_min: float
    nir_max: float
    kind = "band_threshold"

    def __post_init__(self):
        for name in ("blue_min", "nir_max"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise PlumeInputError(f"threshold out of range: {name}={v}")

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        return (X[:, BLUE] >= self.blue_min) & (X[:, NIR] <= self.nir_max)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.predict(X).astype(np.float64)

    def predict_mask(self, scene: Scene) -> np.ndarray:
        return band_threshold(scene, self.blue_min, self.nir_max)

    def to_dict(self) -> dict:
        return {"blue_min": self.blue_min, "nir_max": self.nir_max}

    @classmethod
    def from_dict(cls, params: dict) -> BandThreshold:
        return cls(float(params["blue_min"]), float(params["nir_max"]))


def band_threshold(scene: Scene, blue_min: float, nir_max: float) -> np.ndarray:
    """Plume mask from normalized blue >= blue_min and nir <= nir_max."""
    for name, v in (("blue_min", blue_min), ("nir_max", nir_max)):
        if not 0.0 <= v <= 1.0:
            raise PlumeInputError(f"threshold out of range: {name}={v}")
    blue = scene.bands[BLUE] / U16_MAX
    nir = scene.bands[NIR] / U16_MAX
    return (blue >= blue_min) & (nir <= nir_max)


def _grid_counts(scene: Scene) -> tuple[np.ndarray, np.ndarray]:
    """Per-(blue index, nir index) pixel counts for plume and all pixels.

    Blue index ``b`` means the pixel passes ``blue >= i/50`` for every
    ``i <= b``; NIR index ``n`` means it passes ``nir <= j/50`` for every
    ``j >= n``. Both use exact integer arithmetic on the raw samples.
    """
    blue = scene.bands[BLUE].ravel().astype(np.int64)
    nir = scene.bands[NIR].ravel().astype(np.int64)
    b_idx = (GRID_STEPS * blue) // U16_MAX
    n_idx = -((-GRID_STEPS * nir) // U16_MAX)  # ceil
    size = GRID_STEPS + 1
    flat = b_idx * size + n_idx
    total = np.bincount(flat, minlength=size * size).reshape(size, size)
    plume = np.bincount(flat, weights=scene.label.ravel(), minlength=size * size)
    return plume.reshape(size, size), total


def _iou_grid(scene: Scene) -> np.ndarray:
    """Plume IoU for every (blue_min index, nir_max index) pair."""
    plume, total = _grid_counts(scene)
    # passing pixels: b_idx >= i and n_idx <= j
    def cum(a):
        return np.cumsum(np.cumsum(a[::-1], axis=0)[::-1], axis=1)

    tp = cum(plume)
    pred = cum(total)
    truth = plume.sum()
    denom = truth + pred - tp
    with np.errstate(invalid="ignore", divide="ignore"):
        iou = np.where(denom > 0, tp / np.where(denom > 0, denom, 1), 0.0)
    return iou


def fit_band_threshold(scenes) -> BandThreshold:
    """Grid-search both thresholds over {0, 0.02, ..., 1} for the best mean IoU.

    Ties go to the smaller ``blue_min``, then the larger ``nir_max``. If no
    training pixel is plume, a warning is issued and the classify-nothing
    thresholds (1.0, 0.0) are returned.
    """
    scenes = list(scenes)
    if not scenes:
        raise PlumeInputError("empty training set")
    for s in scenes:
        if s.label is None:
            raise PlumeInputError(f"scene {s.id} has no label")
    if not any(s.label.any() for s in scenes):
        warnings.warn("no plume pixels in the training set; thresholds classify nothing")
        return BandThreshold(1.0, 0.0)
    mean_iou = sum(_iou_grid(s) for s in scenes) / len(scenes)
    best = mean_iou.max()
    # rows ascend in blue_min; reverse the columns so argmax prefers larger nir_max
    flipped = mean_iou[:, ::-1]
    i, j_rev = np.unravel_index(np.argmax(flipped == best), flipped.shape)
    j = GRID_STEPS - j_rev
    return BandThreshold(i / GRID_STEPS, j / GRID_STEPS)
