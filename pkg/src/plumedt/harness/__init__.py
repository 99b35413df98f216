from plumedt.harness.experiment import (
    ExperimentResult,
    aggregate_rows,
    render_report,
    run_experiment,
    split_dataset,
    write_reports,
)
from plumedt.harness.overlay import emit_overlay, render_overlay
from plumedt.harness.pipeline import (
    PipelineConfig,
    RunReport,
    TrajectoryMetrics,
    evaluate_trajectory,
    run_onboard,
    run_pipeline,
)
from plumedt.harness.utility import (
    SOBEL5_X,
    SOBEL5_Y,
    UtilityFields,
    gradient_field,
    intensity_field,
    sobel5,
    utility_fields,
)

__all__ = [
    "ExperimentResult",
    "PipelineConfig",
    "RunReport",
    "SOBEL5_X",
    "SOBEL5_Y",
    "TrajectoryMetrics",
    "UtilityFields",
    "aggregate_rows",
    "emit_overlay",
    "evaluate_trajectory",
    "gradient_field",
    "intensity_field",
    "render_overlay",
    "render_report",
    "run_experiment",
    "run_onboard",
    "run_pipeline",
    "sobel5",
    "split_dataset",
    "utility_fields",
    "write_reports",
]
