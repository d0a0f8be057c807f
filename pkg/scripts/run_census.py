"""Run the builtin census cold (fresh cache, shipped certificates ignored) and then warm.

Usage: python scripts/run_census.py [OUT_DIR]
"""

import sys
import tempfile
import time
from pathlib import Path

from permuta.census import CensusConfig, run_census


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("census_out")
    with tempfile.TemporaryDirectory() as cache:
        times = {}
        for label in ("cold", "warm"):
            t0 = time.time()
            res = run_census(CensusConfig(out_dir=out / label, cache_dir=Path(cache), use_golden=False, workers=4))
            times[label] = time.time() - t0
            bad = [r["name"] + ":" + r["disagreements"] for r in res.rows if r["status"] != "agree"]
            print(f"{label}: exit {res.exit_code}, {len(res.rows)} groups, {res.searches} searches, "
                  f"{times[label]:.1f}s; not agreeing: {bad}")
    print(f"speed-up {times['cold'] / max(times['warm'], 1e-9):.1f}x")


if __name__ == "__main__":
    main()
