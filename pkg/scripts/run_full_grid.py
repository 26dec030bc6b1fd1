#!/usr/bin/env python3
"""Run the full 3x2x4 sensitivity grid on a dataset and print a summary.

Usage: run_full_grid.py [CONFIG_TOML] [OUT_DIR]

Defaults to the bundled synthetic fixtures and ./out/full_grid.
"""

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]


def main() -> int:
    from spaceport_planner.cli import main as cli_main

    config = sys.argv[1] if len(sys.argv) > 1 else str(REPO / "data" / "fixtures" / "config.toml")
    out = sys.argv[2] if len(sys.argv) > 2 else str(REPO / "out" / "full_grid")
    rc = cli_main(["--config", config, "--out", out, "sweep"])
    if rc == 0:
        rc = cli_main(["--config", config, "--out", out, "report"])
    return rc


if __name__ == "__main__":
    sys.exit(main())
