"""
All six planners on one scene, scored against the hidden utility fields.
Writes one PPM overlay per planner.
"""

import sys
import tempfile
from pathlib import Path

from plumedt.classify import Oracle, train_model
from plumedt.harness import emit_overlay, run_pipeline
from plumedt.morphology import denoise
from plumedt.planner import ALGORITHMS, BASELINES, DISPLAY_NAMES
from plumedt.synthgen import generate_dataset

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="plumedt_"))
out.mkdir(parents=True, exist_ok=True)

scenes = generate_dataset(9, base_seed=21)
train, scene = scenes[:8], scenes[8]
model = train_model("decision_tree", train)

print(f"{'planner':<20}{'points':>7}{'ratio':>8}{'intensity':>11}{'gradient':>10}   (oracle ratio)")
for alg in ALGORITHMS:
    traj, rep = run_pipeline(scene, model, alg)
    _, best = run_pipeline(scene, Oracle(), alg)
    print(f"{DISPLAY_NAMES[alg]:<20}{rep.pixels_observed:7d}{rep.ratio_plume:8.3f}"
          f"{rep.mean_intensity:11.3f}{rep.mean_gradient:10.3f}   ({best.ratio_plume:.3f})")
    mask = None if alg in BASELINES else denoise(model.predict_mask(scene))
    emit_overlay(scene, traj, mask, out / f"{alg}.ppm")

print("\noverlays in", out)
