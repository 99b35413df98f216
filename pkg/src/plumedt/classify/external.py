"""Masks produced outside this package, used in place of a trained classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from plumedt.errors import PlumeInputError
from plumedt.raster import Scene, as_mask, load_mask


def import_external_mask(path, scene: Scene | None = None) -> np.ndarray:
    """Load a PGM plume mask, checking its size against `scene` if given."""
    mask = load_mask(path)
    if scene is not None and mask.shape != scene.shape:
        raise PlumeInputError(
            f"external mask {mask.shape[1]}x{mask.shape[0]} does not match "
            f"scene {scene.width}x{scene.height}"
        )
    return mask


@dataclass(frozen=True, eq=False)
class FixedMask:
    """Classifier stand-in that returns a precomputed mask."""

    mask: np.ndarray
    kind: str = "external"

    def predict_mask(self, scene: Scene) -> np.ndarray:
        return as_mask(self.mask, scene.shape).copy()


class Oracle:
    """Returns the scene's ground-truth label."""

    kind = "oracle"

    def predict_mask(self, scene: Scene) -> np.ndarray:
        if scene.label is None:
            raise PlumeInputError(f"scene {scene.id} has no label for the oracle")
        return np.array(scene.label, dtype=bool)
