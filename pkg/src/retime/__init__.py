"""Duration-exact video frame re-timing.

Given per-frame slowness likelihoods (or any per-frame re-timing signal), the
package optimizes a temporal frame subsampling that hits a target output
length exactly while speeding up only the frames that tolerate it.  It also
ships a synthetic ground-truth generator, reference baselines, and an
evaluation harness comparing them.

The numerical core runs on a compiled extension when available and on a
pure-numpy fallback otherwise; see :func:`active_backend`.
"""

from ._backend import active_backend
from .baselines import (
    SweepDetail,
    align_skip_count,
    integration_walk,
    speednet_retime,
    speednet_sweep,
    uniform_retime,
)
from .errors import (
    DegenerateSignalError,
    InvalidInputError,
    InvalidTargetError,
    RetimeError,
)
from .evaluation import ExperimentReport, mae, run_suite
from .model_math import class_weights, temporal_difference_concat, weighted_ce_loss
from .optimizer import (
    SKIP_FLOOR,
    RetimeConfig,
    RetimeResult,
    default_lambda,
    loss_min,
    loss_signal,
    loss_smooth,
    loss_speediness,
    loss_sum,
    optimize,
    to_frame_indices,
    total_loss_and_gradient,
)
from .signals import (
    ONE_SLOW,
    ZERO_SLOW,
    RetimeSignal,
    SlownessMatrix,
    cosine_similarity_signal,
    interpolate_rows,
    normalize_signal,
    sharpen,
    speediness_to_signal,
)
from .synth import (
    GroundTruthCase,
    make_case,
    make_duration_case,
    perfect_slowness,
    sample_sigma,
    sample_skips,
    skips_to_indices,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateSignalError",
    "ExperimentReport",
    "GroundTruthCase",
    "InvalidInputError",
    "InvalidTargetError",
    "ONE_SLOW",
    "RetimeConfig",
    "RetimeError",
    "RetimeResult",
    "RetimeSignal",
    "SKIP_FLOOR",
    "SlownessMatrix",
    "SweepDetail",
    "ZERO_SLOW",
    "active_backend",
    "align_skip_count",
    "class_weights",
    "cosine_similarity_signal",
    "default_lambda",
    "integration_walk",
    "interpolate_rows",
    "loss_min",
    "loss_signal",
    "loss_smooth",
    "loss_speediness",
    "loss_sum",
    "mae",
    "make_case",
    "make_duration_case",
    "normalize_signal",
    "optimize",
    "perfect_slowness",
    "run_suite",
    "sample_sigma",
    "sample_skips",
    "sharpen",
    "skips_to_indices",
    "speednet_retime",
    "speednet_sweep",
    "speediness_to_signal",
    "temporal_difference_concat",
    "to_frame_indices",
    "total_loss_and_gradient",
    "uniform_retime",
    "weighted_ce_loss",
]
