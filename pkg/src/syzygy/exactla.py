"""Exact sparse rank over word-size prime fields, with multi-prime certification.

rank() runs sparse Gaussian elimination with Markowitz-style pivot selection:
all zero-fill pivots (singleton rows/columns, Markowitz count 0) are eliminated
first with pure bookkeeping, then the surviving dense core is finished by a
blocked mod-p LU whose panel updates go through BLAS (float64 matmul is exact
here: products are bounded by panel * p^2 < 2^53).  Rank over F_p never
exceeds the rational rank, so agreement across two primes certifies the
generic value; a dense fraction-free (Bareiss) elimination over the integers
is kept as the test oracle.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .koszul import SparseTriplets

DEFAULT_PRIMES = (32003, 65537)

# Direct-dense shortcut for tiny matrices; densify cap for the core left by
# the sparse sweep (float64 cells; 24e6 cells = 192 MB).
_SMALL_DENSE_CELLS = 65_536
_DENSE_CELL_CAP = 24_000_000


class FieldFailure(ValueError):
    """Invalid prime field modulus."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """F_p for an odd prime p < 2^31."""

    p: int

    def __post_init__(self) -> None:
        if not (2 < self.p < 2**31) or not _is_prime(self.p):
            raise FieldFailure(f"{self.p} is not an odd prime below 2^31")


@dataclass
class RankResult:
    rank: int
    prime: int
    pivots: int
    elapsed: float


def _dense_rank_per_pivot(a: np.ndarray, p: int) -> int:
    """Reference row-echelon rank over F_p; int64, one vectorized update per pivot."""
    a = a % p
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr], :] = a[[pr, r], :]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        if r + 1 < m:
            f = a[r + 1 :, c].copy()
            a[r + 1 :, c:] = (a[r + 1 :, c:] - f[:, None] * a[r, c:][None, :]) % p
        r += 1
    return r


def _dense_rank_panel(a: np.ndarray, p: int, panel: int) -> int:
    """Blocked right-looking LU rank over F_p in exact float64 arithmetic.

    Entries live in [0, p); panel columns are factored with immediate updates
    (multipliers stored in place), then the trailing matrix gets one matmul
    update per panel.  Exactness needs panel * p^2 < 2^53.
    """
    A = a.astype(np.float64)
    m, n = A.shape
    r = 0
    c0 = 0
    while c0 < n and r < m:
        c1 = min(c0 + panel, n)
        P = A[r:, c0:c1]
        pm = P.shape[0]
        k = 0
        pivots: list[tuple[int, int]] = []  # (panel column, inverse of pivot value)
        for c in range(c1 - c0):
            nz = np.flatnonzero(P[k:, c])
            if nz.size == 0:
                continue
            pr = k + int(nz[0])
            if pr != k:
                A[[r + k, r + pr], c0:] = A[[r + pr, r + k], c0:]
            inv = pow(int(P[k, c]), -1, p)
            P[k, c:] = (P[k, c:] * inv) % p
            if k + 1 < pm:
                # multipliers stay in place in column c (skipped by the update)
                f = P[k + 1 :, c]
                fnz = np.flatnonzero(f)
                if fnz.size * 4 < f.size:
                    idx = fnz + (k + 1)
                    P[idx, c + 1 :] = (P[idx, c + 1 :] - np.outer(f[fnz], P[k, c + 1 :])) % p
                else:
                    P[k + 1 :, c + 1 :] = (P[k + 1 :, c + 1 :] - np.outer(f, P[k, c + 1 :])) % p
            pivots.append((c, inv))
            k += 1
            if k == pm:
                break
        if k and c1 < n:
            piv_idx = [c for c, _ in pivots]
            U = A[r : r + k, c1:]
            for t in range(k):
                if t:
                    U[t] = (U[t] - P[t, piv_idx[:t]] @ U[:t]) % p
                U[t] = (U[t] * pivots[t][1]) % p
            if r + k < m:
                L21 = P[k:, piv_idx]
                A[r + k :, c1:] = (A[r + k :, c1:] - L21 @ U) % p
        r += k
        c0 = c1
    return r


def _dense_rank(a: np.ndarray, p: int) -> int:
    m, n = a.shape
    if m == 0 or n == 0:
        return 0
    if n > m:
        a = np.ascontiguousarray(a.T)
        m, n = n, m
    panel = min(64, (2**53) // (p * p))
    if panel >= 8:
        return _dense_rank_panel(a % p, p, int(panel))
    return _dense_rank_per_pivot(a, p)


def _zero_fill_sweep(
    rows: dict[int, dict[int, int]], cols: dict[int, dict[int, int]], p: int
) -> int:
    """Eliminate every pivot of Markowitz count zero (singleton row or column).

    Such pivots cause no fill: the pivot removes its row and column outright.
    Cascades until no singleton is left.
    """
    rank = 0
    stack = [("r", r) for r, d in rows.items() if len(d) == 1]
    stack += [("c", c) for c, d in cols.items() if len(d) == 1]

    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            if idx not in rows or len(rows[idx]) != 1:
                continue
            r = idx
            (c,) = rows[r]
        else:
            if idx not in cols or len(cols[idx]) != 1:
                continue
            c = idx
            (r,) = cols[c]
        rank += 1
        row_cols = [c2 for c2 in rows[r] if c2 != c]
        col_rows = [r2 for r2 in cols[c] if r2 != r]
        del rows[r]
        del cols[c]
        for c2 in row_cols:
            del cols[c2][r]
            if len(cols[c2]) == 1:
                stack.append(("c", c2))
            elif not cols[c2]:
                del cols[c2]
        for r2 in col_rows:
            del rows[r2][c]
            if len(rows[r2]) == 1:
                stack.append(("r", r2))
            elif not rows[r2]:
                del rows[r2]
    return rank


def _markowitz_sparse(rows: dict[int, dict[int, int]], cols: dict[int, dict[int, int]], p: int) -> int:
    """General sparse elimination, pivot minimizing (r_count-1)*(c_count-1).

    Ties break at the lowest (row, col) index.  Fallback for cores too large
    to densify; correctness over speed.
    """
    rank = 0
    while rows:
        best = None
        for c in sorted(cols):
            ccount = len(cols[c])
            for r in sorted(cols[c]):
                cost = (len(rows[r]) - 1) * (ccount - 1)
                if best is None or cost < best[0] or (cost == best[0] and (r, c) < best[1]):
                    best = (cost, (r, c))
            if best and best[0] == 0:
                break
        _, (r, c) = best
        rank += 1
        inv = pow(rows[r][c], -1, p)
        pivot_row = {c2: v for c2, v in rows[r].items() if c2 != c}
        eliminators = [r2 for r2 in cols[c] if r2 != r]
        for c2 in pivot_row:
            del cols[c2][r]
        del rows[r]
        del cols[c]
        for r2 in eliminators:
            f = rows[r2].pop(c) * inv % p
            target = rows[r2]
            for c2, v in pivot_row.items():
                nv = (target.get(c2, 0) - f * v) % p
                if nv:
                    if c2 not in target:
                        cols[c2][r2] = 1
                    target[c2] = nv
                elif c2 in target:
                    del target[c2]
                    del cols[c2][r2]
            if not target:
                del rows[r2]
        for c2 in list(pivot_row):
            if c2 in cols and not cols[c2]:
                del cols[c2]
    return rank


def rank_triplets(
    row_idx: np.ndarray,
    col_idx: np.ndarray,
    values: np.ndarray,
    p: int,
) -> int:
    """Rank over F_p of a COO matrix (duplicate positions are summed)."""
    v = np.asarray(values, dtype=np.int64) % p
    keep = v != 0
    if not keep.any():
        return 0
    r_ids = np.asarray(row_idx, dtype=np.int64)[keep]
    c_ids = np.asarray(col_idx, dtype=np.int64)[keep]
    v = v[keep]
    ur, ri = np.unique(r_ids, return_inverse=True)
    uc, ci = np.unique(c_ids, return_inverse=True)
    m, n = len(ur), len(uc)

    if m * n <= _SMALL_DENSE_CELLS:
        a = np.zeros((m, n), dtype=np.int64)
        np.add.at(a, (ri, ci), v)
        return _dense_rank(a, p)

    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, dict[int, int]] = {}
    for r, c, val in zip(ri.tolist(), ci.tolist(), v.tolist()):
        row = rows.setdefault(r, {})
        nv = (row.get(c, 0) + val) % p
        if nv:
            row[c] = nv
            cols.setdefault(c, {})[r] = 1
        elif c in row:
            del row[c]
            del cols[c][r]
    for r in [r for r, d in rows.items() if not d]:
        del rows[r]
    for c in [c for c, d in cols.items() if not d]:
        del cols[c]
    if not rows:
        return 0

    total = _zero_fill_sweep(rows, cols, p)
    if not rows:
        return total

    live_rows = sorted(rows)
    live_cols = sorted({c for d in rows.values() for c in d})
    if len(live_rows) * len(live_cols) <= _DENSE_CELL_CAP:
        rpos = {r: k for k, r in enumerate(live_rows)}
        cpos = {c: k for k, c in enumerate(live_cols)}
        a = np.zeros((len(live_rows), len(live_cols)), dtype=np.int64)
        for r, d in rows.items():
            rk = rpos[r]
            for c, val in d.items():
                a[rk, cpos[c]] = val
        return total + _dense_rank(a, p)
    return total + _markowitz_sparse(rows, cols, p)


def rank(m: SparseTriplets, f: PrimeField) -> RankResult:
    """Rank of a sparse matrix over F_p; deterministic given (matrix, p)."""
    t0 = time.perf_counter()
    r = rank_triplets(m.row_idx, m.col_idx, m.values, f.p)
    return RankResult(rank=r, prime=f.p, pivots=r, elapsed=time.perf_counter() - t0)


def rank_certified(
    m: SparseTriplets, primes: Sequence[PrimeField | int]
) -> tuple[int, bool]:
    """Highest rank across primes plus an agreement flag.

    Rank mod p never exceeds the rational rank, so the maximum is the best
    lower bound and disagreement flags an unlucky prime.
    """
    fields = [q if isinstance(q, PrimeField) else PrimeField(q) for q in primes]
    if len({f.p for f in fields}) < 2:
        raise ValueError("certification needs at least two distinct primes")
    ranks = [rank(m, f).rank for f in fields]
    return max(ranks), len(set(ranks)) == 1


def rank_rational_dense(m: SparseTriplets) -> int:
    """Fraction-free (Bareiss) rank over the rationals; test oracle only."""
    if m.cols > 2000:
        raise ValueError("dense rational oracle is capped at 2000 columns")
    a = [[0] * m.cols for _ in range(m.rows)]
    for r, c, v in zip(m.row_idx.tolist(), m.col_idx.tolist(), m.values.tolist()):
        a[r][c] += v
    rank_ = 0
    prev = 1
    for c in range(m.cols):
        if rank_ == m.rows:
            break
        pivot = next((x for x in range(rank_, m.rows) if a[x][c] != 0), None)
        if pivot is None:
            continue
        if pivot != rank_:
            a[rank_], a[pivot] = a[pivot], a[rank_]
        piv_row = a[rank_]
        pv = piv_row[c]
        for x in range(rank_ + 1, m.rows):
            row = a[x]
            fx = row[c]
            for y in range(c, m.cols):
                row[y] = (pv * row[y] - fx * piv_row[y]) // prev
        prev = pv
        rank_ += 1
    return rank_
