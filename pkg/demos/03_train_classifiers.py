"""
Five-fold cross-validation of the pixel classifiers on synthetic scenes.

Takes a couple of minutes; the forest and the MLP dominate.
"""

import time

from plumedt.classify import DISPLAY_NAMES, KINDS, cross_validate
from plumedt.synthgen import generate_dataset

scenes = generate_dataset(20, base_seed=7)
print(f"{len(scenes)} scenes of {scenes[0].width}x{scenes[0].height}\n")
print(f"{'classifier':<22}{'IoU':>7}{'+denoise':>10}{'precision':>11}{'recall':>8}{'time':>8}")
for kind in KINDS:
    t0 = time.perf_counter()
    cv = cross_validate(kind, scenes, k=5, seed=0)
    raw, den = cv.mean_raw, cv.mean_denoised
    print(f"{DISPLAY_NAMES[kind]:<22}{raw['iou']:7.3f}{den['iou']:10.3f}"
          f"{raw['precision']:11.3f}{raw['recall']:8.3f}{time.perf_counter() - t0:7.1f}s")
