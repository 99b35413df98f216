"""
Hidden science-utility fields used to score trajectories.

Intensity is the normalized blue band inside the ground-truth plume label,
rescaled to a maximum of 1. Gradient is the 5x5 Sobel magnitude of the
intensity, also rescaled to a maximum of 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from plumedt.errors import PlumeInputError
from plumedt.raster import BLUE, U16_MAX, Scene

_SMOOTH = np.array([1.0, 4.0, 6.0, 4.0, 1.0])
_DERIV = np.array([-1.0, -2.0, 0.0, 2.0, 1.0])

# 3x3 Sobel convolved with the 3x3 binomial [1 2 1] x [1 2 1].
SOBEL5_X = np.outer(_SMOOTH, _DERIV)
SOBEL5_Y = SOBEL5_X.T


@dataclass(frozen=True, eq=False)
class UtilityFields:
    intensity: np.ndarray
    gradient: np.ndarray


def _max_normalize(field: np.ndarray) -> np.ndarray:
    peak = field.max() if field.size else 0.0
    if peak <= 0:
        return np.zeros_like(field)
    return field / peak


def intensity_field(scene: Scene) -> np.ndarray:
    """Label-masked blue reflectance scaled to a maximum of 1."""
    if scene.label is None:
        raise PlumeInputError(f"scene {scene.id} has no label; intensity utility needs one")
    blue = scene.bands[BLUE] / U16_MAX
    return _max_normalize(np.where(scene.label, blue, 0.0))


def sobel5(field: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """x and y 5x5 Sobel responses with reflect-101 borders.

    Responses are in correlation orientation, so a field increasing to the
    right gives a positive x response.
    """
    field = np.asarray(field, dtype=np.float64)
    gx = ndimage.correlate(field, SOBEL5_X, mode="mirror")
    gy = ndimage.correlate(field, SOBEL5_Y, mode="mirror")
    return gx, gy


def gradient_field(intensity: np.ndarray) -> np.ndarray:
    """5x5 Sobel gradient magnitude scaled to a maximum of 1.

    Responses within the rounding error of the 25-tap sums are set to zero
    first, so a constant field gives an all-zero gradient instead of
    normalized round-off.
    """
    intensity = np.asarray(intensity, dtype=np.float64)
    gx, gy = sobel5(intensity)
    mag = np.hypot(gx, gy)
    scale = np.abs(intensity).max() if intensity.size else 0.0
    tol = 32 * np.finfo(np.float64).eps * np.abs(SOBEL5_X).sum() * scale
    return _max_normalize(np.where(mag > tol, mag, 0.0))


def utility_fields(scene: Scene) -> UtilityFields:
    intensity = intensity_field(scene)
    return UtilityFields(intensity, gradient_field(intensity))
