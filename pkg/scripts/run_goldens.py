#!/usr/bin/env python3
"""Compute the reference Betti tables and print grids, profiles and timings.

The default set is the four desk-scale instances; --quartic adds the plane
quartic (minutes), --stretch adds the long-running ones (hours).  A cache
directory makes repeated runs instant.
"""

from __future__ import annotations

import argparse
import os
import time

from syzygy import betti, cache, cli, theory, variety

DEFAULT = ["P:2/2", "P:2/3", "F:0/2,2", "F:0/2,3"]
QUARTIC = ["P:2/4"]
STRETCH = ["P:2/5", "F:0/2,4", "F:0/2,5", "F:0/3,3", "F:0/3,4"]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quartic", action="store_true", help="include P:2/4")
    ap.add_argument("--stretch", action="store_true", help="include the hour-scale instances")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--cache-dir", default=os.environ.get(cache.ENV_CACHE_DIR))
    args = ap.parse_args()

    keys = list(DEFAULT)
    if args.quartic or args.stretch:
        keys += QUARTIC
    if args.stretch:
        keys += STRETCH
    rank_cache = cache.RankCache(args.cache_dir) if args.cache_dir else None

    for key in keys:
        vtag, btag = key.split("/")
        model = variety.parse_model(vtag)
        Dv = variety.parse_divisor(model, btag)
        t0 = time.perf_counter()
        table = betti.compute_table(model, Dv, jobs=args.jobs, rank_cache=rank_cache)
        elapsed = time.perf_counter() - t0
        print(f"== {key}  ({elapsed:.1f}s)")
        print(cli.render_table_text(table))
        prof = betti.profile(table)
        pred = theory.conjecture_delta(model, Dv).threshold
        print(
            f"profile: p_max={prof.p_max} q_max={prof.q_max} tug={prof.tug} "
            f"delta={prof.delta} (predicted delta {pred})"
        )
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
