"""Append-only rank cache.

One CSV file of lines `variety;bundle;i;j;prime;dim;rank;version`; the key
(variety, bundle, i, j, prime, version) is unique, writes go through an
atomic temp-file rename.  Records from other tool versions are ignored.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from . import __version__

ENV_CACHE_DIR = "SYZYGY_CACHE_DIR"
_FILENAME = "ranks.csv"


class RankCache:
    def __init__(self, directory: str | os.PathLike):
        self.path = Path(directory) / _FILENAME
        self._records: dict[tuple[str, str, int, int, int], tuple[int, int]] = {}
        self._lines: list[str] = []
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        for raw in self.path.read_text().splitlines():
            line = raw.strip()
            if not line:
                continue
            # keep every line verbatim (append-only file); index only records
            # of the current tool version
            self._lines.append(line)
            parts = line.split(";")
            if len(parts) != 8 or parts[7] != __version__:
                continue
            try:
                variety, bundle = parts[0], parts[1]
                i, j, prime, dim, rank = (int(x) for x in parts[2:7])
            except ValueError:
                continue
            self._records[(variety, bundle, i, j, prime)] = (dim, rank)

    def get(self, variety: str, bundle: str, i: int, j: int, prime: int) -> int | None:
        hit = self._records.get((variety, bundle, i, j, prime))
        return hit[1] if hit is not None else None

    def put(
        self, variety: str, bundle: str, i: int, j: int, prime: int, dim: int, rank: int
    ) -> None:
        key = (variety, bundle, i, j, prime)
        if key in self._records:
            return
        self._records[key] = (dim, rank)
        self._lines.append(f"{variety};{bundle};{i};{j};{prime};{dim};{rank};{__version__}")
        self._flush()

    def _flush(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".ranks-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write("\n".join(self._lines) + "\n")
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def cache_from_config(cache_dir: str | None, no_cache: bool) -> RankCache | None:
    """Resolve the cache per flag > environment variable > disabled."""
    if no_cache:
        return None
    directory = cache_dir or os.environ.get(ENV_CACHE_DIR)
    return RankCache(directory) if directory else None
