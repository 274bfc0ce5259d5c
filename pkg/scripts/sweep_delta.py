#!/usr/bin/env python3
"""Tabulate delta(a, b) on P^1 x P^1 against the closed form (a-1)(b-2).

Thin wrapper over `syzygy sweep`; the default window reproduces the
published delta column 0, 1, 2, 3 for a = 2, b = 2..5.
"""

from __future__ import annotations

import argparse
import sys

from syzygy import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", default="2")
    ap.add_argument("--b", default="2..5")
    ap.add_argument("--jobs", default=None)
    ap.add_argument("--cache-dir", default=None)
    args = ap.parse_args()
    argv = ["sweep", "--variety", "F:0", "--a", args.a, "--b", args.b]
    if args.jobs:
        argv += ["--jobs", str(args.jobs)]
    if args.cache_dir:
        argv += ["--cache-dir", args.cache_dir]
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
