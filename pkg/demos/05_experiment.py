"""
The full grid: every classifier with every planner on held-out scenes,
written as CSV tables plus a markdown summary. Takes under a minute.

Same thing from the shell: ``plumedt experiment --seed 2024 --count 41 --report-dir out``.
"""

import sys
import tempfile
from pathlib import Path

from plumedt.harness import render_report, run_experiment, write_reports
from plumedt.synthgen import generate_dataset

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="plumedt_"))

scenes = generate_dataset(41, base_seed=2024)
result = run_experiment(scenes, seed=2024, n_train=21)
write_reports(result, out)
print(render_report(out))

nadir = result.aggregate("straight_nadir")["ratio_plume"]
lawn = result.aggregate("lawnmower_transect", "random_forest")["ratio_plume"]
print(f"lawnmower + forest sees plume {lawn / nadir:.1f}x as often as the nadir track")
print("tables in", out)
