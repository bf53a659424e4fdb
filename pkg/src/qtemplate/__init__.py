"""Statevector simulation of probabilistic quantum template matching with
QFT-based noise filtering, sequential second-hypothesis testing, and
comparison against optimal two-state discrimination bounds."""

from .circuit_ops import (
    FilterSpec,
    diffusion,
    grover_oracle,
    grover_step,
    iteration_count,
    iqft,
    iqft_2d,
    noise_filter,
    prepare_point_state,
    qft,
    qft_2d,
    sharp_cutoff_theta,
)
from .core_state import StateVector
from .discrimination import (
    DiscriminationReport,
    build_report,
    helstrom_error,
    naive_projector_error,
    optimal_two_state_error,
    overlap_amplitude,
)
from .errors import PbmParseError, PostSelectionImpossibleError
from .image_io import (
    AmplitudeMap,
    BinaryImage,
    invert_pixels,
    parse_pbm,
    render_amplitude_map,
    write_pbm,
    write_pgm,
)
from .optics_layout import (
    PhaseSchedule,
    ResourceCounts,
    compose_optical_qft,
    qft_phase_schedule,
    resource_counts,
)
from .pipeline import (
    MatchOptions,
    MatchOutcome,
    SecondTryOutcome,
    SweepRow,
    SweepTable,
    overlap_probability,
    run_match,
    run_second_hypothesis,
    sweep_noise,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeMap",
    "BinaryImage",
    "DiscriminationReport",
    "FilterSpec",
    "MatchOptions",
    "MatchOutcome",
    "PbmParseError",
    "PhaseSchedule",
    "PostSelectionImpossibleError",
    "ResourceCounts",
    "SecondTryOutcome",
    "StateVector",
    "SweepRow",
    "SweepTable",
    "build_report",
    "compose_optical_qft",
    "diffusion",
    "grover_oracle",
    "grover_step",
    "helstrom_error",
    "invert_pixels",
    "iqft",
    "iqft_2d",
    "iteration_count",
    "naive_projector_error",
    "noise_filter",
    "optimal_two_state_error",
    "overlap_amplitude",
    "overlap_probability",
    "parse_pbm",
    "prepare_point_state",
    "qft",
    "qft_2d",
    "qft_phase_schedule",
    "render_amplitude_map",
    "resource_counts",
    "run_match",
    "run_second_hypothesis",
    "sharp_cutoff_theta",
    "sweep_noise",
    "write_pbm",
    "write_pgm",
]
