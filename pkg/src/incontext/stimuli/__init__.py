from .annotations import (TargetAnnotation, IngestResult, SIZE_BINS, UNBINNED,
                          AnnotationFormatError, compute_extent, size_bin_for,
                          ingest_annotations)
from .conditions import StimulusCondition, EXPERIMENT_PARAMS
from .manifest import (Manifest, TrialSpec, TimingConfig, TrialDropped,
                       MS_PER_STEP, build_schedule, compose_trial_manifest,
                       read_manifest, write_manifest, render_condition)
from .selection import BalanceConfig, InfeasibleSelectionError, select_targets
from . import transforms
from . import synthetic
from . import images

__all__ = [
    "TargetAnnotation", "IngestResult", "SIZE_BINS", "UNBINNED",
    "AnnotationFormatError", "compute_extent", "size_bin_for",
    "ingest_annotations", "StimulusCondition", "EXPERIMENT_PARAMS",
    "Manifest", "TrialSpec", "TimingConfig", "TrialDropped", "MS_PER_STEP",
    "build_schedule", "compose_trial_manifest", "read_manifest",
    "write_manifest", "render_condition", "BalanceConfig",
    "InfeasibleSelectionError", "select_targets", "transforms", "synthetic",
    "images",
]
