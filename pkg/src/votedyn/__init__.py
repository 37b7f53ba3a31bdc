"""Clamped bounded-confidence opinion dynamics: simulation and analysis.

The update map adds to each opinion h times the average opinion over its
confidence window and clamps to [-1, 1].  The package implements the map
exactly, classifies and certifies its fixed points, verifies the spectral
convergence theory numerically, and ships a CLI harness that reproduces
the reference election-flip experiment.
"""

from .config import ExperimentConfig, parse_config, render_config
from .errors import (
    AsymmetricInfluence,
    ClassificationGap,
    ConfigError,
    ConstraintViolation,
    DeltaTooLarge,
    EmptyProfile,
    EntryOutOfRange,
    IncrementOrderViolation,
    InsufficientRecord,
    LengthMismatch,
    NotStabilized,
    OnHyperplane,
    VotedynError,
)
from .dynamics import (
    InfluenceWindow,
    ModelParams,
    OpinionProfile,
    Trajectory,
    TrajectoryStatus,
    distance,
    increments,
    influence_windows,
    iterate,
    make_profile,
    phi,
    prefix_sums,
    slice_average,
    window_bounds,
)
from .fixedpoints import (
    BasinCertificate,
    FixedPointClass,
    FixedPointKind,
    InstabilityWitness,
    SeparationCertificate,
    admissible_perturbation_radius,
    basic_point,
    classify_fixed_point,
    construct_nonbasic,
    instability_witness,
    is_fixed_point,
    separation_certificate,
    basin_certificate,
)
from .harness import RunSummary, export_trajectory, reproduce_paper, run, sweep
from .spectral import (
    InfluenceMatrix,
    SpectralReport,
    build_influence_matrix,
    interior_block,
    predict_limit,
    predict_terminal,
    spectrum_check,
    stabilization_step,
)

__version__ = "0.1.0"

__all__ = [
    "AsymmetricInfluence",
    "BasinCertificate",
    "ClassificationGap",
    "ConfigError",
    "ConstraintViolation",
    "DeltaTooLarge",
    "EmptyProfile",
    "EntryOutOfRange",
    "IncrementOrderViolation",
    "InsufficientRecord",
    "LengthMismatch",
    "NotStabilized",
    "OnHyperplane",
    "VotedynError",
    "ExperimentConfig",
    "FixedPointClass",
    "FixedPointKind",
    "InfluenceMatrix",
    "InfluenceWindow",
    "InstabilityWitness",
    "ModelParams",
    "OpinionProfile",
    "RunSummary",
    "SeparationCertificate",
    "SpectralReport",
    "Trajectory",
    "TrajectoryStatus",
    "admissible_perturbation_radius",
    "basic_point",
    "build_influence_matrix",
    "classify_fixed_point",
    "construct_nonbasic",
    "distance",
    "export_trajectory",
    "increments",
    "influence_windows",
    "instability_witness",
    "interior_block",
    "is_fixed_point",
    "iterate",
    "make_profile",
    "parse_config",
    "phi",
    "predict_limit",
    "predict_terminal",
    "prefix_sums",
    "render_config",
    "reproduce_paper",
    "run",
    "separation_certificate",
    "slice_average",
    "spectrum_check",
    "stabilization_step",
    "sweep",
    "basin_certificate",
    "window_bounds",
]
