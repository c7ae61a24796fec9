#!/usr/bin/env python3
"""
Bounds from a marker recording: rider-bike distance (from a two-point
com/ref recording, or the segment-model CoM to a reference marker on the
bike), its acceleration, then min/max.

    python -m scripts.run_bounds markers.csv [ref_marker] [smooth_window]
"""
import sys

from mocap.segments import link_length_series
from mocap.series import accel_series, extract_bounds, read_marker_csv
from tools.csv_io import format_report

if __name__ == "__main__":
    markers = read_marker_csv(sys.argv[1])
    ref = sys.argv[2] if len(sys.argv) > 2 else "down_tube"
    window = int(sys.argv[3]) if len(sys.argv) > 3 else None
    l = link_length_series(markers, ref=ref)
    a = accel_series(l, smooth_window=window)
    print(format_report(extract_bounds(l, a).model_dump()), end="")
