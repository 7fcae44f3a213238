"""Everything around the math: data generation, file formats, experiments."""

from .experiments import (
    ComparisonRow,
    PoolingSpec,
    ResultTable,
    build_model,
    prepare_dataset,
    prepare_for_model,
    run_comparison,
    sweep_filters,
)
from .featfile import load_features, save_features
from .manifest import (
    DatasetManifest,
    labeled_frames,
    load_dataset,
    load_manifest,
    save_manifest,
)
from .synthetic import TASK_KINDS, SyntheticSpec, gen_synthetic

__all__ = [
    "ComparisonRow",
    "DatasetManifest",
    "PoolingSpec",
    "ResultTable",
    "SyntheticSpec",
    "TASK_KINDS",
    "build_model",
    "gen_synthetic",
    "labeled_frames",
    "load_dataset",
    "load_features",
    "load_manifest",
    "prepare_dataset",
    "prepare_for_model",
    "run_comparison",
    "save_features",
    "save_manifest",
    "sweep_filters",
]
