"""Koszul complex machinery: wedge bases, differentials, multidegree blocks.

The complex for a line bundle D with V = H^0(D) and R_j = H^0(jD) is

    wedge^(i+1) V (x) R_(j-1)  -->  wedge^i V (x) R_j  -->  wedge^(i-1) V (x) R_(j+1)

with differential d(e_S (x) m) = sum_t (-1)^t e_(S minus s_t) (x) (s_t * m).
Wedge factors are indexed by colexicographic rank; the basis of
wedge^i V (x) R_j is ordered row-major by (wedge rank, monomial index).
Since every basis monomial has a torus multidegree and the differential
preserves it, each matrix splits into independent blocks, one per
multidegree; ranks are computed blockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import variety
from .variety import Divisor, MonomialBasis, SurfaceModel

DEFAULT_SIZE_CAP = 50_000_000


class SizeCap(RuntimeError):
    """Unblocked matrix would exceed the configured nonzero guard."""


def wedge_rank(subset: Sequence[int]) -> int:
    """Colex rank of a strictly increasing subset of {0..dimV-1}."""
    return sum(math.comb(c, t + 1) for t, c in enumerate(subset))


def wedge_unrank(rank: int, i: int) -> tuple[int, ...]:
    """Inverse of wedge_rank for subsets of size i."""
    out = [0] * i
    r = rank
    for k in range(i, 0, -1):
        m = k - 1
        while math.comb(m + 1, k) <= r:
            m += 1
        r -= math.comb(m, k)
        out[k - 1] = m
    return tuple(out)


@dataclass(frozen=True)
class WedgeIndex:
    """A wedge basis element of wedge^i V: subset plus its colex rank."""

    subset: tuple[int, ...]
    rank: int

    @classmethod
    def from_subset(cls, subset: Sequence[int]) -> "WedgeIndex":
        return cls(tuple(subset), wedge_rank(subset))


@dataclass(frozen=True)
class KoszulBasisElement:
    """Basis element e_S (x) m of wedge^i V (x) R_j."""

    wedge: WedgeIndex
    monomial: int

    def flat_index(self, monomial_count: int) -> int:
        return self.wedge.rank * monomial_count + self.monomial


def _colex_subsets(dim_v: int, i: int) -> Iterator[tuple[int, ...]]:
    if i == 0:
        yield ()
        return
    if i > dim_v:
        return
    for top in range(i - 1, dim_v):
        for rest in _colex_subsets(top, i - 1):
            yield rest + (top,)


def wedge_enumerate(dim_v: int, i: int) -> Iterator[WedgeIndex]:
    """All C(dimV, i) wedge indices in colex order; rank of the k-th item is k."""
    if not 0 <= i <= dim_v:
        raise ValueError(f"need 0 <= i <= dimV, got i={i}, dimV={dim_v}")
    for k, subset in enumerate(_colex_subsets(dim_v, i)):
        yield WedgeIndex(subset, k)


@dataclass
class SparseTriplets:
    """Integer COO matrix; assembled differentials carry entries in {+1, -1}."""

    rows: int
    cols: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    @classmethod
    def from_entries(
        cls, rows: int, cols: int, entries: Sequence[tuple[int, int, int]]
    ) -> "SparseTriplets":
        r = np.fromiter((e[0] for e in entries), dtype=np.int64, count=len(entries))
        c = np.fromiter((e[1] for e in entries), dtype=np.int64, count=len(entries))
        v = np.fromiter((e[2] for e in entries), dtype=np.int64, count=len(entries))
        return cls(rows, cols, r, c, v)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def entries(self) -> list[tuple[int, int, int]]:
        return list(zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()))

    def transpose(self) -> "SparseTriplets":
        return SparseTriplets(self.cols, self.rows, self.col_idx, self.row_idx, self.values)


@dataclass
class DegreeBlock:
    """One multidegree block of a Koszul differential."""

    multidegree: tuple[int, ...]
    row_indices: np.ndarray
    col_indices: np.ndarray
    triplets: SparseTriplets


def _graded_piece(model: SurfaceModel, D: Divisor, j: int) -> MonomialBasis:
    return variety.section_basis(model, D.scale(j))


def _require_ample_bpf(model: SurfaceModel, D: Divisor) -> None:
    if not variety.is_ample(model, D):
        raise variety.NotAmple(f"{D.coeffs} is not ample on {model.tag}")
    if not variety.is_basepoint_free(model, D):
        raise variety.NotBasePointFree(f"{D.coeffs} not base point free on {model.tag}")


def matrix_shape(model: SurfaceModel, D: Divisor, i: int, j: int) -> tuple[int, int]:
    """(rows, cols) of the differential wedge^i V (x) R_j -> wedge^(i-1) V (x) R_(j+1)."""
    dv = variety.h0(model, D)
    cols = math.comb(dv, i) * variety.h0(model, D.scale(j)) if i >= 0 else 0
    rows = (
        math.comb(dv, i - 1) * variety.h0(model, D.scale(j + 1)) if i >= 1 else 0
    )
    return rows, cols


def _removal_ranks(subset: tuple[int, ...]) -> list[tuple[int, int]]:
    """For each position t, (colex rank of subset minus its t-th element, sign)."""
    terms_keep = [math.comb(s, t + 1) for t, s in enumerate(subset)]
    terms_drop = [math.comb(s, t) for t, s in enumerate(subset)]
    suffix = [0] * (len(subset) + 1)
    for t in range(len(subset) - 1, -1, -1):
        suffix[t] = suffix[t + 1] + terms_drop[t]
    prefix = 0
    out = []
    for t in range(len(subset)):
        rank = prefix + suffix[t + 1]
        out.append((rank, -1 if t % 2 else 1))
        prefix += terms_keep[t]
    return out


def _assemble(
    model: SurfaceModel, D: Divisor, i: int, j: int, size_cap: int | None
) -> tuple[SparseTriplets, np.ndarray, np.ndarray]:
    """Differential plus per-column and per-row multidegree arrays."""
    if i < 1 or j < 0:
        raise ValueError(f"differential needs i >= 1, j >= 0, got i={i}, j={j}")
    _require_ample_bpf(model, D)

    v_basis = variety.section_basis(model, D).points
    dv = len(v_basis)
    rj = _graded_piece(model, D, j).points
    rj1 = _graded_piece(model, D, j + 1).points
    ncols_mon = len(rj)
    nrows_mon = len(rj1)
    rows, cols = matrix_shape(model, D, i, j)
    nnz = i * cols
    if size_cap is not None and nnz > size_cap:
        raise SizeCap(
            f"differential (i={i}, j={j}) on {model.tag}/{D.coeffs} has "
            f"{nnz} nonzeros > cap {size_cap}"
        )

    ndim = len(v_basis[0]) if dv else (model.dimension + 1 if isinstance(model, variety.ProjectiveSpace) else 2)
    v_deg = np.array(v_basis, dtype=np.int64).reshape(dv, ndim)
    rj_deg = np.array(rj, dtype=np.int64).reshape(ncols_mon, ndim)
    rj1_deg = np.array(rj1, dtype=np.int64).reshape(nrows_mon, ndim)

    def wedge_degrees(size: int) -> np.ndarray:
        if size == 0:
            return np.zeros((1, ndim), dtype=np.int64)
        out = np.empty((math.comb(dv, size), ndim), dtype=np.int64)
        for w, subset in enumerate(_colex_subsets(dv, size)):
            out[w] = v_deg[list(subset)].sum(axis=0)
        return out

    if cols == 0 or rows == 0:
        empty = np.zeros(0, dtype=np.int64)
        trip = SparseTriplets(rows, cols, empty, empty, empty)
        col_mdeg = (
            (wedge_degrees(i)[:, None, :] + rj_deg[None, :, :]).reshape(cols, ndim)
            if cols
            else np.zeros((0, ndim), dtype=np.int64)
        )
        row_mdeg = (
            (wedge_degrees(i - 1)[:, None, :] + rj1_deg[None, :, :]).reshape(rows, ndim)
            if rows
            else np.zeros((0, ndim), dtype=np.int64)
        )
        return trip, col_mdeg, row_mdeg

    rj1_index = {p: k for k, p in enumerate(rj1)}
    # prod[s, m] = index of section s * monomial m inside R_(j+1)
    prod = np.empty((dv, ncols_mon), dtype=np.int64)
    for s, spt in enumerate(v_basis):
        for m, mpt in enumerate(rj):
            prod[s, m] = rj1_index[variety.multiply(model, spt, mpt)]

    nwedge = math.comb(dv, i)
    wedge_deg = np.empty((nwedge, ndim), dtype=np.int64)
    row_parts = []
    col_parts = []
    val_parts = []
    mon_range = np.arange(ncols_mon, dtype=np.int64)
    for w, subset in enumerate(_colex_subsets(dv, i)):
        wedge_deg[w] = v_deg[list(subset)].sum(axis=0)
        col_base = w * ncols_mon + mon_range
        for (rw, sign), s in zip(_removal_ranks(subset), subset):
            row_parts.append(rw * nrows_mon + prod[s])
            col_parts.append(col_base)
            val_parts.append(np.full(ncols_mon, sign, dtype=np.int64))
    trip = SparseTriplets(
        rows,
        cols,
        np.concatenate(row_parts),
        np.concatenate(col_parts),
        np.concatenate(val_parts),
    )

    col_mdeg = (wedge_deg[:, None, :] + rj_deg[None, :, :]).reshape(cols, ndim)
    row_mdeg = (wedge_degrees(i - 1)[:, None, :] + rj1_deg[None, :, :]).reshape(rows, ndim)
    return trip, col_mdeg, row_mdeg


def differential(
    model: SurfaceModel,
    D: Divisor,
    i: int,
    j: int,
    size_cap: int | None = DEFAULT_SIZE_CAP,
) -> SparseTriplets:
    """Matrix of wedge^i V (x) R_j -> wedge^(i-1) V (x) R_(j+1).

    Columns are ordered by (wedge rank, monomial index), rows likewise; the
    sign for dropping the t-th (0-based) wedge factor is (-1)^t.  Every
    column has exactly i nonzeros.
    """
    trip, _, _ = _assemble(model, D, i, j, size_cap)
    return trip


def multidegree(
    model: SurfaceModel, D: Divisor, subset: Sequence[int], monomial: int, j: int
) -> tuple[int, ...]:
    """Torus multidegree of the basis element e_subset (x) (monomial of R_j)."""
    v_basis = variety.section_basis(model, D).points
    mon = _graded_piece(model, D, j).points[monomial]
    acc = list(mon)
    for s in subset:
        for k, c in enumerate(v_basis[s]):
            acc[k] += c
    return tuple(acc)


def multidegree_blocks(
    model: SurfaceModel,
    D: Divisor,
    i: int,
    j: int,
    size_cap: int | None = DEFAULT_SIZE_CAP,
) -> list[DegreeBlock]:
    """Split the differential into independent blocks, one per multidegree.

    Blocks are returned in lexicographic multidegree order and jointly
    partition both the column and the row index sets; the full matrix is the
    direct sum of the block matrices.
    """
    rows, cols = matrix_shape(model, D, i, j)
    if cols == 0 and rows == 0:
        return []
    trip, col_mdeg, row_mdeg = _assemble(model, D, i, j, size_cap)
    return _blocks_from_parts(trip, col_mdeg, row_mdeg)


def _blocks_from_parts(
    trip: SparseTriplets, col_mdeg: np.ndarray, row_mdeg: np.ndarray
) -> list[DegreeBlock]:
    all_deg = np.concatenate([col_mdeg, row_mdeg], axis=0)
    uniq, inverse = np.unique(all_deg, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    col_block = inverse[: trip.cols]
    row_block = inverse[trip.cols :]

    entry_block = col_block[trip.col_idx] if trip.nnz else np.zeros(0, dtype=np.int64)
    order = np.argsort(entry_block, kind="stable")
    eb_sorted = entry_block[order]
    bounds = np.searchsorted(eb_sorted, np.arange(len(uniq) + 1))

    blocks: list[DegreeBlock] = []
    for b in range(len(uniq)):
        cols_b = np.flatnonzero(col_block == b)
        rows_b = np.flatnonzero(row_block == b)
        sel = order[bounds[b] : bounds[b + 1]]
        loc_r = np.searchsorted(rows_b, trip.row_idx[sel])
        loc_c = np.searchsorted(cols_b, trip.col_idx[sel])
        blocks.append(
            DegreeBlock(
                multidegree=tuple(int(x) for x in uniq[b]),
                row_indices=rows_b,
                col_indices=cols_b,
                triplets=SparseTriplets(
                    len(rows_b), len(cols_b), loc_r, loc_c, trip.values[sel]
                ),
            )
        )
    return blocks


def _symmetry_images(
    model: SurfaceModel, D: Divisor, k: int, mdeg: tuple[int, ...]
) -> list[tuple[int, ...]]:
    """Orbit of a weight-k multidegree under the section-polytope symmetries.

    Any affine lattice map phi_w = L + w*t sending the weight-w basis to
    itself for every w is a graded monoid automorphism, so it permutes the
    Koszul bases compatibly with the differential: blocks along one orbit
    have equal rank.  P^n has the coordinate permutations; F_e the trapezoid
    flip y -> w*b - e*x - y, plus the x-flip (and the factor swap when
    a = b) on F_0.
    """
    if isinstance(model, variety.ProjectiveSpace):
        return [tuple(sorted(mdeg))]
    a, b = D.coeffs
    e = model.e
    x, y = mdeg
    images = {(x, y), (x, k * b - e * x - y)}
    if e == 0:
        images.update({(k * a - xx, yy) for xx, yy in list(images)})
        if a == b:
            images.update({(yy, xx) for xx, yy in list(images)})
    return sorted(images)


def canonical_block_key(
    model: SurfaceModel, D: Divisor, k: int, mdeg: tuple[int, ...]
) -> tuple[int, ...]:
    return _symmetry_images(model, D, k, mdeg)[0]


def orbit_groups(
    model: SurfaceModel, D: Divisor, i: int, j: int, blocks: Sequence[DegreeBlock]
) -> list[tuple[int, list[int]]]:
    """Group block indices into symmetry orbits: (representative, members).

    The representative is the lowest block id of each orbit; member shapes
    are asserted equal to the representative's as a consistency guard.
    """
    k = i + j
    groups: dict[tuple[int, ...], list[int]] = {}
    for idx, blk in enumerate(blocks):
        key = canonical_block_key(model, D, k, blk.multidegree)
        groups.setdefault(key, []).append(idx)
    out = []
    for key in sorted(groups):
        members = groups[key]
        rep = members[0]
        shape = (blocks[rep].triplets.rows, blocks[rep].triplets.cols)
        for m in members[1:]:
            assert (blocks[m].triplets.rows, blocks[m].triplets.cols) == shape, (
                "symmetry orbit with mismatched block shapes"
            )
        out.append((rep, members))
    return out


def differential_rank(
    model: SurfaceModel,
    D: Divisor,
    i: int,
    j: int,
    prime: int,
    size_cap: int | None = DEFAULT_SIZE_CAP,
) -> int:
    """Blockwise rank of the differential over F_prime (serial path)."""
    from . import exactla

    dv = variety.h0(model, D)
    if i < 1 or i > dv or j < 0:
        return 0
    rows, cols = matrix_shape(model, D, i, j)
    if rows == 0 or cols == 0:
        return 0
    field = exactla.PrimeField(prime)
    blocks = multidegree_blocks(model, D, i, j, size_cap)
    total = 0
    for rep, members in orbit_groups(model, D, i, j, blocks):
        t = blocks[rep].triplets
        if t.nnz:
            total += exactla.rank(t, field).rank * len(members)
    return total


def koszul_dimension(
    model: SurfaceModel,
    D: Divisor,
    i: int,
    j: int,
    primes: Sequence[int] = (32003,),
    size_cap: int | None = DEFAULT_SIZE_CAP,
) -> int:
    """dim of the Koszul cohomology at (i, j): the graded Betti number b_(i,i+j).

    Equals dim(wedge^i V (x) R_j) minus the ranks of the outgoing and incoming
    differentials (absent maps at the boundary contribute 0); ranks are the
    maximum over the supplied primes, each computed blockwise.
    """
    _require_ample_bpf(model, D)
    if j < 0 or i < 0:
        return 0
    dv = variety.h0(model, D)
    if i > dv:
        return 0
    dim = math.comb(dv, i) * variety.h0(model, D.scale(j))
    if dim == 0:
        return 0
    rank_out = 0
    rank_in = 0
    if i >= 1:
        rank_out = max(differential_rank(model, D, i, j, p, size_cap) for p in primes)
    if j >= 1 and i + 1 <= dv:
        rank_in = max(
            differential_rank(model, D, i + 1, j - 1, p, size_cap) for p in primes
        )
    return dim - rank_out - rank_in
