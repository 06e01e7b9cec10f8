"""Head-pose prediction filters, preprocessing and benchmark harness."""

from ._core import (
    ClockError,
    NumericalDegeneracy,
    Predictor,
    TraceFormatError,
    bench,
    butterworth_magnitude,
    classify,
    filter_trace,
    geodesic_distance,
    label_chunk,
    load_trace,
    lz_entropy,
    orientation_error,
    position_error,
    quat_exp,
    quat_log,
    right_jacobian,
    right_jacobian_inv,
    save_trace,
    synthetic_trace,
)

__all__ = [
    "ClockError",
    "NumericalDegeneracy",
    "Predictor",
    "TraceFormatError",
    "bench",
    "butterworth_magnitude",
    "classify",
    "filter_trace",
    "geodesic_distance",
    "label_chunk",
    "load_trace",
    "lz_entropy",
    "orientation_error",
    "position_error",
    "quat_exp",
    "quat_log",
    "right_jacobian",
    "right_jacobian_inv",
    "save_trace",
    "synthetic_trace",
]
