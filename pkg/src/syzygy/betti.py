"""Betti tables: assembly from blockwise Koszul ranks, certification, profiles.

A table holds beta_(i,i+j) for 0 <= i <= r and 0 <= j <= j_max, with
r = h^0(D) - 1.  The section rings of the supported models are
arithmetically Cohen-Macaulay, so the projective dimension is r - dim(X)
and the top weight j_max equals deg N(t) - (r - dim(X)), where N(t) is the
Hilbert numerator; the certificate re-checks the whole table against N(t)
via the alternating-sum identity sum_i (-1)^i beta_(i,k) = N_k.
"""

from __future__ import annotations

import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from . import exactla, koszul, variety
from .variety import Divisor, SurfaceModel


class TableHasHoles(RuntimeError):
    """Operation requires a table without size-cap holes."""


@dataclass
class BettiTable:
    """Graded Betti numbers of the section ring of (model, D)."""

    variety: str
    bundle: str
    r: int
    j_max: int
    entries: dict[tuple[int, int], int]
    primes: tuple[int, ...]
    certified: bool
    holes: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def beta(self, i: int, j: int) -> int:
        if (i, j) in self.holes:
            raise TableHasHoles(f"entry (i={i}, j={j}) was not computed (size cap)")
        return self.entries.get((i, j), 0)

    @property
    def pd(self) -> int:
        """Projective dimension: last homological index with a nonzero entry."""
        nz = [i for (i, j), b in self.entries.items() if b != 0]
        return max(nz) if nz else 0

    def row(self, j: int) -> list[int]:
        return [self.beta(i, j) for i in range(self.r + 1)]


@dataclass
class SyzygyProfile:
    """Summary statistics of a Betti table.

    delta is the length of the strand carrying syzygies of mixed weights:
    delta = (r - 1) - p_max - q_max.
    """

    p_max: int
    q_max: int
    tug: int
    delta: int
    j_max: int


def _hole_free(table: BettiTable) -> None:
    if table.holes:
        raise TableHasHoles(f"table has holes at {sorted(table.holes)}")


def hilbert_certificate(table: BettiTable, model: SurfaceModel, D: Divisor) -> bool:
    """Check sum_i (-1)^i beta_(i,k) == N_k for every total degree k."""
    _hole_free(table)
    numerator = variety.hilbert_numerator(model, D)
    top = max(len(numerator) - 1, table.r + table.j_max)
    for k in range(top + 1):
        acc = 0
        for i in range(max(0, k - table.j_max), min(k, table.r) + 1):
            acc += (-1) ** i * table.beta(i, k - i)
        want = numerator[k] if k < len(numerator) else 0
        if acc != want:
            return False
    return True


def satisfies_mq(table: BettiTable, q: int) -> bool:
    """No weight-one syzygies in the last q stages: beta_(i,i+1) = 0 on [r-q, r-1]."""
    if not 1 <= q <= table.r - 1:
        raise ValueError(f"need 1 <= q <= r-1 = {table.r - 1}, got q={q}")
    return all(table.beta(i, 1) == 0 for i in range(table.r - q, table.r))


def normally_generated(table: BettiTable) -> bool:
    """Projective normality read off column i=0: beta_(0,j) = 0 for all j >= 1."""
    return all(table.beta(0, j) == 0 for j in range(1, table.j_max + 1))


def satisfies_Mq(table: BettiTable, q: int) -> bool:
    return normally_generated(table) and satisfies_mq(table, q)


def satisfies_Np(table: BettiTable, p: int) -> bool:
    """Projectively normal with only weight-one syzygies through stage p."""
    if p < 0:
        raise ValueError(f"need p >= 0, got {p}")
    if not normally_generated(table):
        return False
    for i in range(1, p + 1):
        for j in range(table.j_max + 1):
            if j != 1 and table.beta(i, j) != 0:
                return False
    return True


def profile(table: BettiTable) -> SyzygyProfile:
    """p_max, q_max, tug and delta read off a hole-free table.

    p_max is capped at the projective dimension (beyond it every stage is
    zero and the linearity condition holds vacuously); q_max is reported as
    0 when even M_1 fails.
    """
    _hole_free(table)
    pd = table.pd
    p_max = 0
    for p in range(1, pd + 1):
        if satisfies_Np(table, p):
            p_max = p
        else:
            break
    q_max = 0
    for q in range(1, max(table.r, 1)):
        if satisfies_Mq(table, q):
            q_max = q
        else:
            break
    return SyzygyProfile(
        p_max=p_max,
        q_max=q_max,
        tug=p_max - q_max,
        delta=(table.r - 1) - p_max - q_max,
        j_max=table.j_max,
    )


# ----------------------------------------------------------------------------
# table assembly


def _rank_chunk(args: tuple) -> list[tuple[int, int, int, int]]:
    """Worker: rank a chunk of (key, prime, block-triplet) tasks."""
    out = []
    for key, p, rows, cols, ridx, cidx, vals in args:
        out.append((key, p, rows, exactla.rank_triplets(ridx, cidx, vals, p)))
    return out


def _make_pool(jobs: int) -> ProcessPoolExecutor:
    # fork keeps worker startup cheap and works from any parent (REPL, stdin
    # scripts, pytest); workers inherit the parent BLAS configuration
    return ProcessPoolExecutor(
        max_workers=jobs,
        mp_context=multiprocessing.get_context("fork"),
    )


def _differential_ranks(
    model: SurfaceModel,
    D: Divisor,
    needed: list[tuple[int, int]],
    primes: Sequence[int],
    size_cap: int | None,
    jobs: int,
    rank_cache=None,
    cache_meta: tuple[str, str] | None = None,
) -> tuple[dict[tuple[int, int, int], int], set[tuple[int, int]]]:
    """Blockwise ranks of the differentials at the given (i, j) positions.

    Returns ({(i, j, prime): rank}, capped positions).  Results are merged in
    block-id order per position, so the outcome does not depend on the worker
    count.
    """
    ranks: dict[tuple[int, int, int], int] = {}
    capped: set[tuple[int, int]] = set()
    missing: list[tuple[int, int]] = []
    for i, j in needed:
        found_all = True
        for p in primes:
            got = None
            if rank_cache is not None and cache_meta is not None:
                got = rank_cache.get(cache_meta[0], cache_meta[1], i, j, p)
            if got is None:
                found_all = False
            else:
                ranks[(i, j, p)] = got
        if not found_all:
            missing.append((i, j))

    pool = None
    if jobs > 1:
        pool = _make_pool(jobs)
    try:
        for i, j in missing:
            rows, cols = koszul.matrix_shape(model, D, i, j)
            if rows == 0 or cols == 0:
                for p in primes:
                    ranks[(i, j, p)] = 0
                _cache_put(rank_cache, cache_meta, i, j, primes, cols, ranks)
                continue
            try:
                blocks = koszul.multidegree_blocks(model, D, i, j, size_cap)
            except koszul.SizeCap:
                capped.add((i, j))
                continue
            groups = koszul.orbit_groups(model, D, i, j, blocks)
            multiplicity = {rep: len(members) for rep, members in groups}
            tasks = []
            for rep in multiplicity:
                t = blocks[rep].triplets
                if t.nnz == 0:
                    continue
                for p in primes:
                    tasks.append((rep, p, t.rows, t.cols, t.row_idx, t.col_idx, t.values))
            per_prime: dict[int, int] = {p: 0 for p in primes}
            if pool is None:
                results = _rank_chunk(tasks)
            else:
                chunks = _chunk_tasks(tasks, jobs)
                results = []
                for part in pool.map(_rank_chunk, chunks):
                    results.extend(part)
            for key, p, _rows, r in results:
                per_prime[p] += r * multiplicity[key]
            for p in primes:
                ranks[(i, j, p)] = per_prime[p]
            _cache_put(rank_cache, cache_meta, i, j, primes, cols, ranks)
    finally:
        if pool is not None:
            pool.shutdown()
    return ranks, capped


def _cache_put(rank_cache, cache_meta, i, j, primes, dim, ranks) -> None:
    if rank_cache is None or cache_meta is None:
        return
    for p in primes:
        rank_cache.put(cache_meta[0], cache_meta[1], i, j, p, dim, ranks[(i, j, p)])


def _chunk_tasks(tasks: list, jobs: int) -> list[list]:
    """Split tasks into balanced chunks, largest work first."""
    tasks = sorted(tasks, key=lambda t: t[2] * t[3], reverse=True)
    nchunks = max(1, min(len(tasks), jobs * 4))
    chunks: list[list] = [[] for _ in range(nchunks)]
    load = [0] * nchunks
    for t in tasks:
        k = load.index(min(load))
        chunks[k].append(t)
        load[k] += t[2] * t[3] + 1
    return [c for c in chunks if c]


def compute_table(
    model: SurfaceModel,
    D: Divisor,
    primes: Sequence[int] = exactla.DEFAULT_PRIMES,
    size_cap: int | None = koszul.DEFAULT_SIZE_CAP,
    jobs: int = 1,
    rank_cache=None,
) -> BettiTable:
    """Full Betti table of (model, D) with multi-prime certification.

    Every entry is a Koszul cohomology dimension
    dim(wedge^i V (x) R_j) - rank d_(i,j) - rank d_(i+1,j-1), ranks taken
    blockwise per multidegree and maximized over the primes.  The certified
    flag requires two distinct primes that agree everywhere plus a passing
    Hilbert certificate.  Size-capped positions become explicit holes.
    """
    if not variety.is_ample(model, D):
        raise variety.NotAmple(f"{D.coeffs} is not ample on {model.tag}")
    for p in primes:
        exactla.PrimeField(p)

    numerator = variety.hilbert_numerator(model, D)
    r = variety.h0(model, D) - 1
    j_max = max(0, (len(numerator) - 1) - (r - model.dimension))
    dv = r + 1

    needed = [
        (i, j)
        for j in range(0, j_max + 1)
        for i in range(1, min(r + 1, dv) + 1)
        if koszul.matrix_shape(model, D, i, j)[1] > 0
    ]
    cache_meta = (model.tag, D.tag)
    ranks, capped = _differential_ranks(
        model, D, needed, tuple(primes), size_cap, jobs, rank_cache, cache_meta
    )

    def best_rank(i: int, j: int) -> int | None:
        if i < 1 or i > dv or j < 0:
            return 0
        if koszul.matrix_shape(model, D, i, j)[1] == 0:
            return 0
        if (i, j) in capped:
            return None
        return max(ranks[(i, j, p)] for p in primes)

    entries: dict[tuple[int, int], int] = {}
    holes: set[tuple[int, int]] = set()
    for j in range(0, j_max + 1):
        for i in range(0, r + 1):
            dim = math.comb(dv, i) * variety.h0(model, D.scale(j))
            r_out = best_rank(i, j)
            r_in = best_rank(i + 1, j - 1)
            if r_out is None or r_in is None:
                holes.add((i, j))
                continue
            entries[(i, j)] = dim - r_out - r_in

    agree = all(
        len({ranks[(i, j, p)] for p in primes}) == 1 for (i, j) in needed if (i, j) not in capped
    )
    table = BettiTable(
        variety=model.tag,
        bundle=D.tag,
        r=r,
        j_max=j_max,
        entries=entries,
        primes=tuple(primes),
        certified=False,
        holes=frozenset(holes),
    )
    table.certified = (
        len(set(primes)) >= 2
        and agree
        and not holes
        and hilbert_certificate(table, model, D)
    )
    return table
