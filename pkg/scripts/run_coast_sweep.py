#!/usr/bin/env python3
"""
Coasting times over a grid of fixed link lengths between l_min and l_max.

    python -m scripts.run_coast_sweep [scenario.cfg] [n_points] [target_phi]
"""
import math
import sys

import numpy as np

from core.config import load_scenario_config
from core.errors import HorizonExceededError
from workflows.simulate import coast_time_to

if __name__ == "__main__":
    cfg = load_scenario_config(sys.argv[1] if len(sys.argv) > 1 else None)
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 7
    target = float(sys.argv[3]) if len(sys.argv) > 3 else 2.0 * math.pi
    scenario = cfg.to_scenario()
    b = scenario.bounds
    for l in np.linspace(b.l_min, b.l_max, n):
        try:
            print(f"l={l:.6f}  t={coast_time_to(scenario, target, float(l)):.4f} s")
        except HorizonExceededError as e:
            print(f"l={l:.6f}  {e}")
