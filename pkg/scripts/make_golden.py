"""Regenerate the shipped certificate files.

Runs every embedding search needed by the builtin census and by the
complete / complete-bipartite checks, writing results straight into
src/permuta/data/certificates.  Usage: python scripts/make_golden.py
"""

import os
import shutil
import time

from permuta import topology
from permuta.census import CensusConfig, run_census
from permuta.graphs import Complete, CompleteBipartite, build
from permuta.topology import GOLDEN_DIR, BudgetExceeded, embeddable_on


def standard_graphs():
    for n in range(3, 9):
        yield f"K{n}", build(Complete(n))
    for m in (2, 3):
        for n in range(2, 8):
            yield f"K{m},{n}", build(CompleteBipartite(m, n))
    yield "K4,4", build(CompleteBipartite(4, 4))


def main():
    if GOLDEN_DIR.exists():
        shutil.rmtree(GOLDEN_DIR)
    GOLDEN_DIR.mkdir(parents=True)
    os.environ["PERMUTA_CACHE_DIR"] = str(GOLDEN_DIR)
    t0 = time.time()
    for name, g in standard_graphs():
        for surface in ("torus", "projective"):
            try:
                cert = embeddable_on(g, surface)
            except BudgetExceeded as exc:
                cert = f"inconclusive ({exc})"
            print(f"{name:6s} {surface:10s} {'yes' if cert is not None else 'no'}")
    res = run_census(CensusConfig(out_dir=None, cache_dir=GOLDEN_DIR, use_golden=False, workers=4))
    print(f"census exit {res.exit_code}, {res.searches} searches")
    print(f"{len(list(GOLDEN_DIR.glob('*.json')))} files, {time.time() - t0:.1f}s, "
          f"{topology.STATS.searches} searches here")


if __name__ == "__main__":
    main()
