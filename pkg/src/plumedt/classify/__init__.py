from plumedt.classify.crossval import CrossValidation, cross_validate, scene_folds
from plumedt.classify.external import FixedMask, Oracle, import_external_mask
from plumedt.classify.features import pixel_samples, scene_features
from plumedt.classify.metrics import ClassMetrics, classification_metrics, mean_metrics
from plumedt.classify.models import (
    DISPLAY_NAMES,
    KINDS,
    MLP,
    DecisionTree,
    GaussianNB,
    HyperParams,
    LogisticRegression,
    RandomForest,
    fit_samples,
    load_model,
    predict_mask,
    save_model,
    train_model,
)
from plumedt.classify.threshold import BandThreshold, band_threshold, fit_band_threshold

__all__ = [
    "BandThreshold",
    "ClassMetrics",
    "CrossValidation",
    "DISPLAY_NAMES",
    "DecisionTree",
    "FixedMask",
    "GaussianNB",
    "HyperParams",
    "KINDS",
    "LogisticRegression",
    "MLP",
    "Oracle",
    "RandomForest",
    "band_threshold",
    "classification_metrics",
    "cross_validate",
    "fit_band_threshold",
    "fit_samples",
    "import_external_mask",
    "load_model",
    "mean_metrics",
    "pixel_samples",
    "predict_mask",
    "save_model",
    "scene_features",
    "scene_folds",
    "train_model",
]
