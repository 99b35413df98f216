"""Scene-level k-fold cross-validation of plume classifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from plumedt.classify.metrics import ClassMetrics, classification_metrics, mean_metrics
from plumedt.classify.models import HyperParams, train_model
from plumedt.errors import PlumeInputError
from plumedt.morphology import DenoiseConfig, denoise


@dataclass
class CrossValidation:
    kind: str
    folds: list[list[int]]
    raw: list[ClassMetrics]
    denoised: list[ClassMetrics]

    @property
    def mean_raw(self) -> dict:
        return mean_metrics(self.raw)

    @property
    def mean_denoised(self) -> dict:
        return mean_metrics(self.denoised)


def scene_folds(n_scenes: int, k: int, seed: int) -> list[list[int]]:
    """Shuffle scene indices by `seed` and cut them into `k` near-equal folds."""
    if k < 2:
        raise PlumeInputError(f"need at least 2 folds, got {k}")
    if n_scenes < k:
        raise PlumeInputError(f"{n_scenes} scenes is fewer than {k} folds")
    order = np.random.default_rng(seed).permutation(n_scenes)
    return [sorted(int(i) for i in part) for part in np.array_split(order, k)]


def cross_validate(
    kind: str,
    scenes,
    k: int = 5,
    seed: int = 0,
    hyper: HyperParams | None = None,
    denoise_config: DenoiseConfig | None = None,
) -> CrossValidation:
    """Train on k-1 folds, score the held-out fold before and after denoising.

    Each fold's metrics pool the confusion counts of all its held-out scenes.
    """
    scenes = list(scenes)
    for s in scenes:
        if s.label is None:
            raise PlumeInputError(f"scene {s.id} has no label")
    folds = scene_folds(len(scenes), k, seed)
    raw, den = [], []
    for held in folds:
        held_set = set(held)
        train = [s for i, s in enumerate(scenes) if i not in held_set]
        model = train_model(kind, train, hyper)
        r = d = None
        for i in held:
            pred = model.predict_mask(scenes[i])
            mr = classification_metrics(pred, scenes[i].label)
            md = classification_metrics(denoise(pred, denoise_config), scenes[i].label)
            r = mr if r is None else r + mr
            d = md if d is None else d + md
        raw.append(r)
        den.append(d)
    return CrossValidation(kind, folds, raw, den)
