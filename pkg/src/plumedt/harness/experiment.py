"""
Grid experiment: every classifier x every planner on held-out scenes.

Classifiers are trained on a seeded train split. Each (classifier, test
scene) pair is classified and denoised once, then reused by every
mask-conditioned planner. Each cell's onboard runtime adds that shared
perception time to its own planning time.

Reports split deterministic content (``detail.csv``, ``aggregate.csv``)
from wall-clock timings (``timings.csv``) so repeated runs with one seed
give byte-identical result tables.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from plumedt.classify.external import Oracle
from plumedt.classify.models import DISPLAY_NAMES as CLASSIFIER_NAMES
from plumedt.classify.models import HyperParams, train_model
from plumedt.errors import PlumeInputError
from plumedt.harness.pipeline import (
    PipelineConfig,
    RunReport,
    make_report,
    perceive,
    plan_from_stages,
)
from plumedt.harness.utility import utility_fields
from plumedt.planner import ALGORITHMS, BASELINES
from plumedt.planner import DISPLAY_NAMES as ALGORITHM_NAMES

DETAIL_COLUMNS = (
    "scene_id", "algorithm", "classifier", "pixels_observed", "unique_pixels",
    "ratio_plume", "mean_intensity", "mean_gradient", "degenerate",
)
AGGREGATE_COLUMNS = (
    "algorithm", "classifier", "n_scenes", "pixels_observed", "unique_pixels",
    "ratio_plume", "mean_intensity", "mean_gradient",
)
TIMING_COLUMNS = (
    "scene_id", "algorithm", "classifier", "runtime_seconds", "classify_seconds",
    "denoise_seconds", "plan_seconds", "eval_seconds",
)
MEAN_FIELDS = ("pixels_observed", "unique_pixels", "ratio_plume", "mean_intensity", "mean_gradient")

DEFAULT_CLASSIFIERS = (
    "band_threshold", "gaussian_nb", "logistic_regression", "decision_tree", "random_forest", "mlp",
)


@dataclass
class ExperimentResult:
    details: list[RunReport]
    aggregates: list[dict]
    train_ids: list[str]
    test_ids: list[str]
    config: dict = field(default_factory=dict)

    def aggregate(self, algorithm: str, classifier: str = "N/A") -> dict:
        for row in self.aggregates:
            if row["algorithm"] == algorithm and row["classifier"] == classifier:
                return row
        raise KeyError((algorithm, classifier))


def split_dataset(scenes, n_train: int, seed: int):
    """Seeded train/test split at scene granularity."""
    scenes = list(scenes)
    if not 0 <= n_train < len(scenes):
        raise PlumeInputError(
            f"n_train={n_train} leaves no test scenes out of {len(scenes)}"
        )
    order = np.random.default_rng(seed).permutation(len(scenes))
    return [scenes[i] for i in order[:n_train]], [scenes[i] for i in order[n_train:]]


def aggregate_rows(details) -> list[dict]:
    """Per-(algorithm, classifier) means, in first-appearance order."""
    groups: dict[tuple[str, str], list[RunReport]] = {}
    for r in details:
        groups.setdefault((r.algorithm, r.classifier), []).append(r)
    rows = []
    for (alg, cls), reports in groups.items():
        row = {"algorithm": alg, "classifier": cls, "n_scenes": len(reports)}
        for name in MEAN_FIELDS:
            row[name] = float(np.mean([getattr(r, name) for r in reports]))
        rows.append(row)
    return rows


def build_classifier(kind: str, train, hyper: HyperParams):
    if kind == "oracle":
        return Oracle()
    return train_model(kind, train, hyper)


def run_experiment(
    dataset,
    classifier_kinds=DEFAULT_CLASSIFIERS,
    algorithms=ALGORITHMS,
    config: PipelineConfig | None = None,
    seed: int = 0,
    n_train: int = 21,
    hyper: HyperParams | None = None,
) -> ExperimentResult:
    """Train, run, and score the full (classifier x algorithm x test scene) grid.

    Baselines run once per test scene with classifier ``"N/A"``.
    """
    config = config or PipelineConfig()
    hyper = hyper or HyperParams(seed=seed)
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise PlumeInputError(f"unknown algorithm {alg!r}")
    train, test = split_dataset(dataset, n_train, seed)
    if not test:
        raise PlumeInputError("empty test split")
    mask_algs = [a for a in algorithms if a not in BASELINES]
    fields = {s.id: utility_fields(s) for s in test}

    details: list[RunReport] = []
    for alg in algorithms:
        if alg in BASELINES:
            for scene in test:
                traj, plan_s = plan_from_stages(scene, None, alg, config)
                details.append(make_report(scene, "N/A", traj, None, plan_s, fields[scene.id]))
    if mask_algs:
        by_cell: dict[tuple[str, str], list[RunReport]] = {}
        for kind in classifier_kinds:
            classifier = build_classifier(kind, train, hyper)
            for scene in test:
                stages = perceive(scene, classifier, config)
                for alg in mask_algs:
                    traj, plan_s = plan_from_stages(scene, stages, alg, config)
                    report = make_report(scene, kind, traj, stages, plan_s, fields[scene.id])
                    by_cell.setdefault((alg, kind), []).append(report)
        for alg in mask_algs:
            for kind in classifier_kinds:
                details.extend(by_cell[(alg, kind)])

    run_config = {
        "seed": seed,
        "n_train": n_train,
        "classifiers": list(classifier_kinds),
        "algorithms": list(algorithms),
        "pipeline": config.as_dict(),
        "hyper": asdict(hyper),
        "train_ids": [s.id for s in train],
        "test_ids": [s.id for s in test],
    }
    return ExperimentResult(
        details, aggregate_rows(details), run_config["train_ids"], run_config["test_ids"],
        run_config,
    )


# --------------------------------------------------------------------------
# report files


def _fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def write_reports(result: ExperimentResult, report_dir, extra_config: dict | None = None) -> Path:
    """Write detail, aggregate, timing CSVs, the run config and a markdown table."""
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    details = [r.as_dict() for r in result.details]
    _write_csv(out / "detail.csv", DETAIL_COLUMNS, details)
    _write_csv(out / "aggregate.csv", AGGREGATE_COLUMNS, result.aggregates)
    _write_csv(out / "timings.csv", TIMING_COLUMNS, details)
    config = dict(result.config)
    if extra_config:
        config.update(extra_config)
    (out / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    (out / "report.md").write_text(render_report(out))
    return out


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def render_report(report_dir) -> str:
    """Markdown version of the aggregate table with mean onboard runtimes."""
    report_dir = Path(report_dir)
    aggregates = read_csv(report_dir / "aggregate.csv")
    runtimes: dict[tuple[str, str], list[float]] = {}
    timing_path = report_dir / "timings.csv"
    if timing_path.exists():
        for row in read_csv(timing_path):
            key = (row["algorithm"], row["classifier"])
            runtimes.setdefault(key, []).append(float(row["runtime_seconds"]))
    lines = [
        "| Trajectory Algorithm | Classifier | Pixels Observed | Unique Pixels | Ratio Plume "
        "| Intensity | Gradient | Runtime (s) |",
        "|---|---|---:|---:|---:|---:|---:|---:|",
    ]
    for row in aggregates:
        key = (row["algorithm"], row["classifier"])
        rt = runtimes.get(key)
        rt_text = f"{np.mean(rt):.3f}" if rt else "-"
        lines.append(
            "| {} | {} | {:.3f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} | {} |".format(
                ALGORITHM_NAMES.get(row["algorithm"], row["algorithm"]),
                CLASSIFIER_NAMES.get(row["classifier"], row["classifier"]),
                float(row["pixels_observed"]),
                float(row["unique_pixels"]),
                float(row["ratio_plume"]),
                float(row["mean_intensity"]),
                float(row["mean_gradient"]),
                rt_text,
            )
        )
    return "\n".join(lines) + "\n"
