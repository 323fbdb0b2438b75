"""Synthesize video frames at arbitrary target times from two inputs.

The package estimates bidirectional optical flow between two frames,
scales it linearly to any target time (between, before, or after the
inputs), forward-warps both frames there, and fuses the results with
time-dependent weights. Synthetic scenes with analytic flow fields back
every numerical claim in the test suite.
"""

from .errors import (
    DatasetIoError,
    DegenerateFusionError,
    DegenerateInputError,
    EstimatorError,
    FrameSynthError,
    InvalidConfigurationError,
    InvalidInputError,
    MalformedHeaderError,
    MissingFileError,
    TruncatedFileError,
    UnsupportedImageError,
    WrongMagicError,
)
from .flow_est import (
    ClassicalParams,
    EstimatorSpec,
    FixedFlows,
    SceneFlows,
    estimate_bidirectional,
    truth_flows_at,
)
from .flow_ops import (
    approximate_flow_pair,
    endpoint_error,
    fit_flow_to,
    rescale_flow,
)
from .fusion import (
    FusionMaps,
    TemporalWeights,
    coverage_fusion_maps,
    fill_unfillable,
    fuse,
    temporal_weights,
)
from .io import (
    FLOW_FILES,
    ROLE_FILES,
    ScanResult,
    TripletRecord,
    read_flo,
    read_image,
    read_manifest,
    scan_dataset,
    write_flo,
    write_image,
    write_manifest,
)
from .metrics import (
    LossParams,
    census_loss,
    charbonnier,
    combined_task_loss,
    psnr,
    reconstruction_loss,
    ssim,
)
from .pyramid import (
    LevelDiagnostics,
    SynthesisOptions,
    SynthesisRequest,
    SynthesisResult,
    choose_levels,
    synthesize,
)
from .scenegen import (
    ROLE_TIMES,
    ROLES,
    Sprite,
    SyntheticScene,
    analytic_flow,
    analytic_flow_at,
    consistency_exclusion_mask,
    layer_ids,
    make_scene,
    make_translating_scene,
    make_triplet,
    render,
    sprite_interior_mask,
)
from .tasking import TaskKind, classify_task, convert_prediction, make_task_channel
from .warp import forward_warp, hole_mask, hole_overlap

__version__ = "0.1.0"

__all__ = [
    "ClassicalParams",
    "DatasetIoError",
    "DegenerateFusionError",
    "DegenerateInputError",
    "EstimatorError",
    "EstimatorSpec",
    "FLOW_FILES",
    "FixedFlows",
    "FrameSynthError",
    "FusionMaps",
    "InvalidConfigurationError",
    "InvalidInputError",
    "LevelDiagnostics",
    "LossParams",
    "MalformedHeaderError",
    "MissingFileError",
    "ROLES",
    "ROLE_FILES",
    "ROLE_TIMES",
    "ScanResult",
    "SceneFlows",
    "Sprite",
    "SyntheticScene",
    "SynthesisOptions",
    "SynthesisRequest",
    "SynthesisResult",
    "TaskKind",
    "TemporalWeights",
    "TruncatedFileError",
    "UnsupportedImageError",
    "WrongMagicError",
    "analytic_flow",
    "analytic_flow_at",
    "approximate_flow_pair",
    "census_loss",
    "charbonnier",
    "choose_levels",
    "classify_task",
    "combined_task_loss",
    "consistency_exclusion_mask",
    "convert_prediction",
    "coverage_fusion_maps",
    "endpoint_error",
    "estimate_bidirectional",
    "fill_unfillable",
    "fit_flow_to",
    "forward_warp",
    "fuse",
    "hole_mask",
    "hole_overlap",
    "layer_ids",
    "make_scene",
    "make_translating_scene",
    "make_triplet",
    "psnr",
    "read_flo",
    "read_image",
    "read_manifest",
    "reconstruction_loss",
    "render",
    "rescale_flow",
    "scan_dataset",
    "sprite_interior_mask",
    "ssim",
    "synthesize",
    "temporal_weights",
    "truth_flows_at",
    "write_flo",
    "write_image",
    "write_manifest",
]
