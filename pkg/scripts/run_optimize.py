#!/usr/bin/env python3
"""
Standalone optimizer run on a scenario file, for manual testing or debugging.

    python -m scripts.run_optimize [scenario.cfg] [out_dir]
"""
import sys
from pathlib import Path

from app.handlers import handle_optimize
from core.config import Config, load_scenario_config

if __name__ == "__main__":
    env = Config()
    cfg = load_scenario_config(sys.argv[1] if len(sys.argv) > 1 else None)
    out = Path(sys.argv[2] if len(sys.argv) > 2 else env.out_dir)
    result = handle_optimize(cfg, out)
    print("Optimize summary:")
    for key, value in result.items():
        print(f"  {key}: {value}")
