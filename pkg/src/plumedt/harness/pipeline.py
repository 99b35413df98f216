"""Single-scene classify -> denoise -> plan -> evaluate pipeline."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from plumedt.errors import ContractViolation, PlumeInputError
from plumedt.harness.utility import UtilityFields, utility_fields
from plumedt.morphology import DenoiseConfig, denoise, get_contours
from plumedt.planner import BASELINES, Trajectory, compute_step_size, plan, transect_width
from plumedt.raster import Scene


@dataclass(frozen=True)
class PipelineConfig:
    denoise: DenoiseConfig = field(default_factory=DenoiseConfig)
    step: int | None = None  # None: 1% of scene width
    width: int | None = None  # None: twice the step

    def step_for(self, scene_width: int) -> int:
        return compute_step_size(scene_width) if self.step is None else self.step

    def width_for(self, step: int) -> int:
        return transect_width(step) if self.width is None else self.width

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrajectoryMetrics:
    pixels_observed: int
    unique_pixels: int
    ratio_plume: float
    mean_intensity: float
    mean_gradient: float
    degenerate: bool


@dataclass(frozen=True)
class RunReport:
    """One row of the end-to-end results table.

    ``runtime_seconds`` covers classification, denoising and planning;
    ``eval_seconds`` the ground-truth scoring, which cannot run onboard.
    """

    scene_id: str
    classifier: str
    algorithm: str
    pixels_observed: int
    unique_pixels: int
    ratio_plume: float
    mean_intensity: float
    mean_gradient: float
    degenerate: bool
    runtime_seconds: float = 0.0
    classify_seconds: float = 0.0
    denoise_seconds: float = 0.0
    plan_seconds: float = 0.0
    eval_seconds: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate_trajectory(traj: Trajectory, scene: Scene, fields: UtilityFields | None = None
                        ) -> TrajectoryMetrics:
    """Score waypoints against the ground-truth label and utility fields.

    Means run over all waypoints, so off-plume observations count as zero
    intensity. An empty trajectory scores zero and is flagged degenerate.
    """
    if scene.label is None:
        raise PlumeInputError(f"scene {scene.id} has no label to evaluate against")
    fields = fields or utility_fields(scene)
    wp = traj.waypoints
    n = len(wp)
    if n == 0:
        return TrajectoryMetrics(0, 0, 0.0, 0.0, 0.0, True)
    traj.check_bounds(scene.shape)
    xs, ys = wp[:, 0], wp[:, 1]
    unique = len(np.unique(wp, axis=0))
    return TrajectoryMetrics(
        pixels_observed=n,
        unique_pixels=unique,
        ratio_plume=float(np.count_nonzero(scene.label[ys, xs])) / n,
        mean_intensity=float(fields.intensity[ys, xs].mean()),
        mean_gradient=float(fields.gradient[ys, xs].mean()),
        degenerate=False,
    )


def classifier_name(classifier) -> str:
    if classifier is None:
        return "N/A"
    return getattr(classifier, "kind", type(classifier).__name__)


@dataclass
class StageOutput:
    """Onboard products for one scene: raw mask, denoised mask, polygons, timings."""

    raw_mask: np.ndarray | None
    mask: np.ndarray | None
    polygons: list | None
    classify_seconds: float = 0.0
    denoise_seconds: float = 0.0


def perceive(scene: Scene, classifier, config: PipelineConfig) -> StageOutput:
    """Classify and denoise a scene, timing each stage."""
    t0 = time.perf_counter()
    raw = np.asarray(classifier.predict_mask(scene), dtype=bool)
    t1 = time.perf_counter()
    if raw.shape != scene.shape:
        raise ContractViolation(f"classifier returned mask {raw.shape} for scene {scene.shape}")
    mask = denoise(raw, config.denoise)
    polygons = get_contours(mask)
    t2 = time.perf_counter()
    return StageOutput(raw, mask, polygons, t1 - t0, t2 - t1)


def plan_from_stages(scene: Scene, stages: StageOutput | None, algorithm: str,
                     config: PipelineConfig) -> tuple[Trajectory, float]:
    step = config.step_for(scene.width)
    width = config.width_for(step)
    t0 = time.perf_counter()
    if algorithm in BASELINES:
        traj = plan(algorithm, np.zeros(scene.shape, dtype=bool), step, width)
    else:
        traj = plan(algorithm, stages.mask, step, width, polygons=stages.polygons)
    return traj, time.perf_counter() - t0


def make_report(scene, classifier_label, traj, stages, plan_seconds, fields=None) -> RunReport:
    t0 = time.perf_counter()
    metrics = evaluate_trajectory(traj, scene, fields)
    eval_seconds = time.perf_counter() - t0
    cls_s = stages.classify_seconds if stages else 0.0
    den_s = stages.denoise_seconds if stages else 0.0
    return RunReport(
        scene_id=scene.id,
        classifier=classifier_label,
        algorithm=traj.algorithm,
        **asdict(metrics),
        runtime_seconds=cls_s + den_s + plan_seconds,
        classify_seconds=cls_s,
        denoise_seconds=den_s,
        plan_seconds=plan_seconds,
        eval_seconds=eval_seconds,
    )


def run_pipeline(scene: Scene, classifier, algorithm: str, config: PipelineConfig | None = None
                 ) -> tuple[Trajectory, RunReport]:
    """Classify, denoise and plan on one scene, then score the trajectory.

    `classifier` is any object with ``predict_mask(scene)``; it is ignored
    (and may be None) for the two baselines. Scoring needs a labeled scene.
    """
    config = config or PipelineConfig()
    if algorithm in BASELINES:
        stages, label = None, "N/A"
    else:
        if classifier is None:
            raise PlumeInputError(f"{algorithm} needs a classifier")
        stages, label = perceive(scene, classifier, config), classifier_name(classifier)
    traj, plan_seconds = plan_from_stages(scene, stages, algorithm, config)
    return traj, make_report(scene, label, traj, stages, plan_seconds)


def run_onboard(scene: Scene, classifier, algorithm: str, config: PipelineConfig | None = None
                ) -> tuple[Trajectory, float]:
    """The onboard part only (no ground truth needed); returns (trajectory, seconds)."""
    config = config or PipelineConfig()
    t0 = time.perf_counter()
    stages = None if algorithm in BASELINES else perceive(scene, classifier, config)
    traj, _ = plan_from_stages(scene, stages, algorithm, config)
    return traj, time.perf_counter() - t0
