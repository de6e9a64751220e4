"""Lane-keeping simulator, perception pipeline and evaluation metrics."""

from ._core import (
    ConfigError,
    HsvThreshold,
    InferenceError,
    InvalidInput,
    LaneEstimate,
    ParseError,
    SingularMatrix,
    SteeringParams,
    UndefinedCorrelation,
    apply_homography,
    calibrate_thresholds,
    classification_metrics,
    cli,
    column_histogram,
    config_hash,
    default_config,
    detect_lane_bounds,
    estimate_lane,
    homography_from_quads,
    normalized_rmse,
    pearson,
    rgb_to_hsv,
    rmse,
    simulate,
    smooth,
    split_counts,
    steering_law,
    summarize_csv,
    threshold_mask,
)

__all__ = [
    "ConfigError",
    "HsvThreshold",
    "InferenceError",
    "InvalidInput",
    "LaneEstimate",
    "ParseError",
    "SingularMatrix",
    "SteeringParams",
    "UndefinedCorrelation",
    "apply_homography",
    "calibrate_thresholds",
    "classification_metrics",
    "cli",
    "column_histogram",
    "config_hash",
    "default_config",
    "detect_lane_bounds",
    "estimate_lane",
    "homography_from_quads",
    "normalized_rmse",
    "pearson",
    "rgb_to_hsv",
    "rmse",
    "simulate",
    "smooth",
    "split_counts",
    "steering_law",
    "summarize_csv",
    "threshold_mask",
]
