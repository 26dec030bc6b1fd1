#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture datasets under data/fixtures/."""

import sys
from pathlib import Path

from spaceport_planner.synth import write_fixture_tree


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "data" / "fixtures"
    write_fixture_tree(out)
    print(f"fixtures written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
