"""
Command line entry point.

Subcommands follow the onboard workflow (classify, denoise, plan) plus the
ground-side tooling around it (synthetic data, training, scoring, the grid
experiment and its report). Exit status is 0 on success, 2 for bad input
and 3 when an internal contract is broken.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

from plumedt.classify import KINDS, FixedMask, HyperParams, Oracle, import_external_mask
from plumedt.classify import load_model, save_model, train_model
from plumedt.errors import ContractViolation, PlumeInputError
from plumedt.harness import (
    PipelineConfig,
    emit_overlay,
    evaluate_trajectory,
    render_report,
    run_experiment,
    write_reports,
)
from plumedt.harness.pipeline import classifier_name, make_report, perceive, plan_from_stages
from plumedt.harness.experiment import DEFAULT_CLASSIFIERS
from plumedt.morphology import DenoiseConfig, denoise, get_contours, write_polygons_csv
from plumedt.planner import ALGORITHMS, BASELINES, plan, read_trajectory_csv, write_trajectory_csv
from plumedt.planner import compute_step_size
from plumedt.raster import downsample, load_dataset, load_mask, load_scene, save_dataset, save_mask
from plumedt.synthgen import generate_dataset

EXIT_OK, EXIT_INPUT, EXIT_CONTRACT = 0, 2, 3


def _parent(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path, doc) -> None:
    _parent(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# --------------------------------------------------------------------------
# subcommands


def cmd_synth(args) -> int:
    scenes = generate_dataset(args.count, args.seed, (args.width, args.height))
    index = save_dataset(scenes, args.out)
    print(f"wrote {len(scenes)} scenes to {index}")
    return EXIT_OK


def cmd_train(args) -> int:
    scenes = load_dataset(args.train_manifest)
    hyper = HyperParams(seed=args.seed, max_samples=args.max_samples)
    t0 = time.perf_counter()
    model = train_model(args.classifier, scenes, hyper)
    elapsed = time.perf_counter() - t0
    save_model(model, _parent(args.model_out), hyper)
    print(f"trained {args.classifier} on {len(scenes)} scenes in {elapsed:.2f}s -> {args.model_out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = load_model(args.model)
    scene = load_scene(args.scene)
    if args.downsample > 1:
        scene = downsample(scene, args.downsample)
    mask = model.predict_mask(scene)
    save_mask(mask, _parent(args.mask_out))
    print(f"{int(mask.sum())} plume pixels of {mask.size} -> {args.mask_out}")
    return EXIT_OK


def cmd_denoise(args) -> int:
    mask = load_mask(args.mask)
    config = DenoiseConfig(args.max_iters, args.min_area_fraction)
    clean = denoise(mask, config)
    save_mask(clean, _parent(args.out))
    if args.polygons_out:
        write_polygons_csv(get_contours(clean), _parent(args.polygons_out))
    print(f"{int(mask.sum())} -> {int(clean.sum())} plume pixels -> {args.out}")
    return EXIT_OK


def cmd_plan(args) -> int:
    mask = load_mask(args.mask)
    scene_width = args.scene_width or mask.shape[1]
    if scene_width < 1:
        raise PlumeInputError("--scene-width must be positive")
    step = args.step or compute_step_size(scene_width)
    traj = plan(args.algorithm, mask, step, args.width)
    write_trajectory_csv(traj, _parent(args.traj_out))
    print(f"{traj.algorithm}: {len(traj)} waypoints (step {traj.step}) -> {args.traj_out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    scene = load_scene(args.scene)
    traj = read_trajectory_csv(args.traj)
    metrics = evaluate_trajectory(traj, scene)
    doc = {"scene_id": scene.id, "algorithm": traj.algorithm, **asdict(metrics)}
    if args.report_out:
        _write_json(args.report_out, doc)
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


def _run_classifier(args, scene):
    sources = [args.model is not None, args.oracle, args.external_mask is not None]
    if sum(sources) > 1:
        raise PlumeInputError("use at most one of --model, --oracle, --external-mask")
    if args.model:
        return load_model(args.model)
    if args.external_mask:
        return FixedMask(import_external_mask(args.external_mask, scene))
    if args.oracle:
        return Oracle()
    return None


def cmd_run(args) -> int:
    scene = load_scene(args.scene)
    if args.downsample > 1:
        scene = downsample(scene, args.downsample)
    classifier = _run_classifier(args, scene)
    config = PipelineConfig(DenoiseConfig(args.max_iters, args.min_area_fraction), args.step, args.width)
    stages = None
    if args.algorithm not in BASELINES:
        if classifier is None:
            raise PlumeInputError(f"{args.algorithm} needs --model, --oracle or --external-mask")
        stages = perceive(scene, classifier, config)
    traj, plan_seconds = plan_from_stages(scene, stages, args.algorithm, config)
    report = make_report(scene, classifier_name(classifier) if stages else "N/A", traj, stages,
                         plan_seconds)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out / "trajectory.csv")
    mask = None
    if stages is not None:
        mask = stages.mask
        save_mask(stages.raw_mask, out / "mask_raw.pgm")
        save_mask(mask, out / "mask_denoised.pgm")
    emit_overlay(scene, traj, mask, out / "overlay.ppm")
    _write_json(out / "report.json", report.as_dict())
    print(
        f"{report.algorithm} / {report.classifier}: {report.pixels_observed} waypoints, "
        f"ratio plume {report.ratio_plume:.3f}, onboard {report.runtime_seconds:.3f}s -> {out}"
    )
    return EXIT_OK


def cmd_experiment(args) -> int:
    t0 = time.perf_counter()
    if args.dataset:
        scenes = load_dataset(args.dataset)
        source = {"dataset": str(args.dataset)}
    else:
        scenes = generate_dataset(args.count, args.seed, (args.width, args.height))
        source = {"synthetic": {"count": args.count, "width": args.width, "height": args.height}}
    config = PipelineConfig(DenoiseConfig(args.max_iters, args.min_area_fraction), args.step, args.width_transect)
    hyper = HyperParams(seed=args.seed, max_samples=args.max_samples)
    result = run_experiment(
        scenes, _csv_list(args.classifiers), _csv_list(args.algorithms), config,
        seed=args.seed, n_train=args.n_train, hyper=hyper,
    )
    out = write_reports(result, args.report_dir, {"source": source})
    print(render_report(out), end="")
    print(f"{len(result.details)} runs in {time.perf_counter() - t0:.1f}s -> {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    text = render_report(args.report_dir)
    if args.out:
        _parent(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _denoise_args(p) -> None:
    d = DenoiseConfig()
    p.add_argument("--max-iters", type=int, default=d.max_merge_iterations,
                   help="closing rounds for fragment merging (default: %(default)s)")
    p.add_argument("--min-area-fraction", type=float, default=d.min_area_fraction,
                   help="drop polygons smaller than this fraction of the frame (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plumedt", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    p.add_argument("--count", type=int, default=38)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a pixel classifier")
    p.add_argument("--classifier", required=True, choices=KINDS)
    p.add_argument("--train-manifest", required=True, help="dataset.json or a scene manifest")
    p.add_argument("--model-out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-samples", type=int, default=HyperParams().max_samples)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="segment one scene with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--scene", required=True, help="scene manifest")
    p.add_argument("--mask-out", required=True, help="PGM mask path")
    p.add_argument("--downsample", type=int, default=1, help="wide-field reduction factor")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("denoise", help="merge fragments, drop small regions, refill")
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--polygons-out", help="optional CSV of the surviving contours")
    _denoise_args(p)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("plan", help="plan a trajectory from a mask")
    p.add_argument("--mask", required=True)
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--scene-width", type=int, help="width used for the 1%% step (default: mask width)")
    p.add_argument("--step", type=int, help="explicit waypoint spacing in pixels")
    p.add_argument("--width", type=int, help="transect spacing (default: twice the step)")
    p.add_argument("--traj-out", required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("eval", help="score a trajectory against a labeled scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--traj", required=True)
    p.add_argument("--report-out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run", help="classify, denoise, plan and score one scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--model", help="trained model JSON")
    p.add_argument("--oracle", action="store_true", help="use the ground-truth label as the mask")
    p.add_argument("--external-mask", help="PGM mask produced elsewhere")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--downsample", type=int, default=1)
    p.add_argument("--step", type=int)
    p.add_argument("--width", type=int)
    _denoise_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="full classifier x planner grid on held-out scenes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-dir", required=True)
    p.add_argument("--dataset", help="dataset.json to use instead of generating scenes")
    p.add_argument("--count", type=int, default=38)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--n-train", type=int, default=21)
    p.add_argument("--classifiers", default=",".join(DEFAULT_CLASSIFIERS),
                   help="comma-separated kinds; 'oracle' uses the label")
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--max-samples", type=int, default=HyperParams().max_samples)
    p.add_argument("--step", type=int)
    p.add_argument("--width-transect", type=int)
    _denoise_args(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="render aggregate.csv as a markdown table")
    p.add_argument("--report-dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContractViolation as exc:
        print(f"plumedt: internal error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (PlumeInputError, OSError, ValueError, KeyError) as exc:
        print(f"plumedt: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
