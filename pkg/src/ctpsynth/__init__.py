"""Crop-transform-paste data synthesis for visual tracking.

Given a single annotated frame per video, the pipeline crops the
target, pushes it through sampled label-preserving transforms, and
pastes it back onto background frames, propagating the bounding box
analytically so every synthesized frame carries an exact label.  A
correlation-filter baseline tracker and OTB-style scoring close the
loop from synthesis to a number.
"""
from .config import (
    Config,
    PairGeometry,
    apply_overrides,
    config_to_items,
    format_config,
    load_config,
    parse_config,
)
from .dataset import (
    KNOWN_TAGS,
    AnnotationSource,
    Frame,
    ReferenceAnnotation,
    SequenceDataset,
    load_frame_images,
    load_sequence_dataset,
    parse_box_line,
    random_annotation,
    read_attributes,
    read_box_file,
)
from .evaluation import (
    PRECISION_THRESHOLDS,
    SUCCESS_THRESHOLDS,
    EvalReport,
    PrecisionCurve,
    SequenceScore,
    SuccessCurve,
    attribute_report,
    auc,
    format_report_table,
    precision_at,
    precision_curve,
    score_sequence,
    success_curve,
)
from .geometry import (
    AffineMap,
    BoundingBox,
    center_error,
    clamp_box,
    corners_to_box,
    iou,
    iround,
    round_half_up,
    transform_box,
)
from .imaging import (
    AlphaMask,
    ImageBuffer,
    Kernel,
    color_histogram,
    composite,
    convolve,
    crop_with_pad,
    load_image,
    quantize,
    save_png,
    warp_affine,
)
from .pairs import (
    TrainingPair,
    export_manifest,
    make_pair,
    manifest_sample,
    pair_record,
    read_manifest,
    sample_pairs,
    sample_record,
    write_manifest_records,
)
from .seeding import hash_name, make_rng, mix64
from .synthesis import (
    LibraryEntry,
    PatchLibrary,
    SynthesizedSample,
    build_patch_library,
    crop_target,
    inject_distractors,
    pad_blend_mask,
    paste,
    synthesize,
    synthesize_one,
)
from .tracker import (
    CorrelationFilter,
    cross_correlate_fft,
    filter_init,
    filter_response,
    filter_track,
    ncc_track,
    track_sequence,
)
from .transforms import (
    KindPolicy,
    SchedulePolicy,
    TargetPatch,
    TransformChain,
    TransformCollapse,
    TransformKind,
    TransformParams,
    apply_chain,
    color_jitter,
    default_policy,
    sample_chain,
    shaking_blur_kernel,
)

__all__ = [
    "AffineMap",
    "AlphaMask",
    "AnnotationSource",
    "BoundingBox",
    "Config",
    "CorrelationFilter",
    "EvalReport",
    "Frame",
    "ImageBuffer",
    "Kernel",
    "KindPolicy",
    "KNOWN_TAGS",
    "LibraryEntry",
    "PairGeometry",
    "PatchLibrary",
    "PrecisionCurve",
    "PRECISION_THRESHOLDS",
    "ReferenceAnnotation",
    "SchedulePolicy",
    "SequenceDataset",
    "SequenceScore",
    "SuccessCurve",
    "SUCCESS_THRESHOLDS",
    "SynthesizedSample",
    "TargetPatch",
    "TrainingPair",
    "TransformChain",
    "TransformCollapse",
    "TransformKind",
    "TransformParams",
    "apply_chain",
    "apply_overrides",
    "attribute_report",
    "auc",
    "build_patch_library",
    "center_error",
    "clamp_box",
    "color_histogram",
    "color_jitter",
    "composite",
    "config_to_items",
    "convolve",
    "corners_to_box",
    "crop_target",
    "crop_with_pad",
    "cross_correlate_fft",
    "default_policy",
    "export_manifest",
    "filter_init",
    "filter_response",
    "filter_track",
    "format_config",
    "format_report_table",
    "hash_name",
    "inject_distractors",
    "iou",
    "iround",
    "load_config",
    "load_frame_images",
    "load_image",
    "load_sequence_dataset",
    "make_pair",
    "make_rng",
    "manifest_sample",
    "mix64",
    "ncc_track",
    "pad_blend_mask",
    "pair_record",
    "parse_box_line",
    "parse_config",
    "paste",
    "precision_at",
    "precision_curve",
    "quantize",
    "random_annotation",
    "read_attributes",
    "read_box_file",
    "read_manifest",
    "round_half_up",
    "sample_chain",
    "sample_pairs",
    "sample_record",
    "save_png",
    "score_sequence",
    "shaking_blur_kernel",
    "success_curve",
    "synthesize",
    "synthesize_one",
    "track_sequence",
    "transform_box",
    "warp_affine",
    "write_manifest_records",
]
