from .series import (
    MarkerSeries,
    ScalarSeries,
    accel_series,
    distance_series,
    extract_bounds,
    read_marker_csv,
    read_scalar_series,
    smooth,
)
from .segments import Segment, SegmentModel, link_length_series, load_segment_model, rider_com

__all__ = [
    "MarkerSeries",
    "ScalarSeries",
    "Segment",
    "SegmentModel",
    "accel_series",
    "distance_series",
    "extract_bounds",
    "link_length_series",
    "load_segment_model",
    "read_marker_csv",
    "read_scalar_series",
    "rider_com",
    "smooth",
]
