"""Order-aware convolutional pooling for sequence classification.

Frame-level feature sequences are aggregated into fixed-length vectors
either by the conventional order-agnostic baselines (average, max,
temporal pyramid pooling) or by learned per-dimension 1D convolutional
filter banks whose responses are pyramid-pooled.  A softmax head trained
with per-instance SGD sits on top, backpropagating through pooling and
convolution.  A signature-based k-means reducer handles very
high-dimensional inputs, and the harness subpackage provides synthetic
order-only datasets, file formats, and a comparison runner.
"""

from . import errors
from .convpool import (
    FilterBank,
    FilterBankSet,
    ResponseSequence,
    conv_dim_forward,
    conv_responses,
    oacp_forward,
    oacp_forward_details,
    param_count_joint,
    param_count_perdim,
)
from .dimreduce import (
    ReductionPartition,
    SignatureMatrix,
    class_signatures,
    kmeans_partition,
    load_partition,
    reduce_sequence,
    save_partition,
)
from .harness import (
    DatasetManifest,
    PoolingSpec,
    ResultTable,
    SyntheticSpec,
    gen_synthetic,
    load_dataset,
    load_features,
    load_manifest,
    prepare_dataset,
    run_comparison,
    save_features,
    save_manifest,
    sweep_filters,
)
from .model import (
    ClassifierModel,
    EpochStats,
    ForwardCache,
    Gradients,
    TrainConfig,
    backward,
    evaluate,
    export_parameters_text,
    forward,
    grad_check,
    instance_loss,
    load_model,
    save_model,
    sgd_train,
    softmax,
)
from .pooling import (
    PyramidConfig,
    average_pool,
    max_pool,
    partition_segments,
    temporal_pyramid_pool,
)
from .sequences import (
    FeatureSequence,
    LabeledSequence,
    concat_frame_features,
    l2_normalize_block,
    l2_normalize_frames,
    replicate_pad,
    sample_frames,
)

__version__ = "0.1.0"

__all__ = [
    "ClassifierModel",
    "DatasetManifest",
    "EpochStats",
    "FeatureSequence",
    "FilterBank",
    "FilterBankSet",
    "ForwardCache",
    "Gradients",
    "LabeledSequence",
    "PoolingSpec",
    "PyramidConfig",
    "ReductionPartition",
    "ResponseSequence",
    "ResultTable",
    "SignatureMatrix",
    "SyntheticSpec",
    "TrainConfig",
    "average_pool",
    "backward",
    "class_signatures",
    "concat_frame_features",
    "conv_dim_forward",
    "conv_responses",
    "errors",
    "evaluate",
    "export_parameters_text",
    "forward",
    "gen_synthetic",
    "grad_check",
    "instance_loss",
    "kmeans_partition",
    "l2_normalize_block",
    "l2_normalize_frames",
    "load_dataset",
    "load_features",
    "load_manifest",
    "load_model",
    "load_partition",
    "max_pool",
    "oacp_forward",
    "oacp_forward_details",
    "param_count_joint",
    "param_count_perdim",
    "partition_segments",
    "prepare_dataset",
    "reduce_sequence",
    "replicate_pad",
    "run_comparison",
    "sample_frames",
    "save_features",
    "save_manifest",
    "save_model",
    "save_partition",
    "sgd_train",
    "softmax",
    "sweep_filters",
    "temporal_pyramid_pool",
]
