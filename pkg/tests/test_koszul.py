from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from syzygy import exactla, koszul, variety

from conftest import D, F0, F2, P1, P2

F = exactla.PrimeField(32003)


def to_csr(t: koszul.SparseTriplets) -> sp.csr_matrix:
    return sp.coo_matrix(
        (t.values, (t.row_idx, t.col_idx)), shape=(t.rows, t.cols)
    ).tocsr()


def colex_oracle(n: int, i: int) -> list[tuple[int, ...]]:
    return sorted(itertools.combinations(range(n), i), key=lambda s: s[::-1])


def test_wedge_enumerate_degenerate():
    assert [w.subset for w in koszul.wedge_enumerate(4, 0)] == [()]
    assert [w.subset for w in koszul.wedge_enumerate(4, 4)] == [(0, 1, 2, 3)]


def test_wedge_enumerate_against_oracle():
    ws = list(koszul.wedge_enumerate(5, 2))
    assert len(ws) == 10
    assert ws[0].subset == (0, 1) and ws[-1].subset == (3, 4)
    assert [w.subset for w in ws] == colex_oracle(5, 2)
    assert [w.rank for w in ws] == list(range(10))


@given(n=st.integers(1, 12), i=st.integers(0, 12))
@settings(max_examples=60)
def test_wedge_rank_unrank_inverse(n, i):
    if i > n:
        return
    for k, subset in enumerate(colex_oracle(n, i)):
        assert koszul.wedge_rank(subset) == k
        assert koszul.wedge_unrank(k, i) == subset


def test_flat_index_convention():
    w = koszul.WedgeIndex.from_subset((0, 2))
    el = koszul.KoszulBasisElement(w, 3)
    assert el.flat_index(monomial_count=5) == w.rank * 5 + 3


def test_differential_evaluation_is_permutation_like():
    t = koszul.differential(P2, D(2), 1, 0)
    assert (t.rows, t.cols) == (6, 6)
    assert exactla.rank(t, F).rank == 6


def test_differential_shapes_and_column_counts():
    t = koszul.differential(P2, D(2), 2, 1)
    assert (t.rows, t.cols) == (90, 90)
    counts = np.bincount(t.col_idx, minlength=t.cols)
    assert (counts == 2).all()
    assert set(np.unique(t.values)) <= {-1, 1}


@pytest.mark.parametrize(
    "model,Dv,i,j",
    [
        (P2, D(2), 2, 0),
        (P2, D(2), 3, 0),
        (P2, D(2), 2, 1),
        (F0, D(1, 2), 3, 0),
        (F2, D(1, 3), 2, 1),
    ],
)
def test_differential_composes_to_zero(model, Dv, i, j):
    inner = koszul.differential(model, Dv, i, j)
    outer = koszul.differential(model, Dv, i - 1, j + 1)
    assert (to_csr(outer) @ to_csr(inner)).nnz == 0


def test_differential_preserves_multidegree():
    t, col_deg, row_deg = koszul._assemble(F2, D(1, 3), 2, 1, None)
    for r, c in zip(t.row_idx.tolist(), t.col_idx.tolist()):
        assert tuple(row_deg[r]) == tuple(col_deg[c])


def test_size_cap():
    with pytest.raises(koszul.SizeCap):
        koszul.differential(P2, D(3), 4, 1, size_cap=10)
    # explicit override disables the guard
    koszul.differential(P2, D(3), 4, 1, size_cap=None)


def test_blocks_small_on_p1():
    blocks = koszul.multidegree_blocks(P1, D(2), 1, 0)
    assert blocks
    for b in blocks:
        assert max(len(b.row_indices), len(b.col_indices)) <= 2


def test_blocks_empty_when_no_columns():
    # i beyond dim V gives the zero object
    assert koszul.multidegree_blocks(P1, D(1), 5, 0) == []


def test_blocks_partition_audit():
    rows, cols = koszul.matrix_shape(F0, D(2, 2), 3, 1)
    blocks = koszul.multidegree_blocks(F0, D(2, 2), 3, 1)
    assert sum(len(b.row_indices) for b in blocks) == rows
    assert sum(len(b.col_indices) for b in blocks) == cols
    seen_rows = np.sort(np.concatenate([b.row_indices for b in blocks]))
    seen_cols = np.sort(np.concatenate([b.col_indices for b in blocks]))
    assert (seen_rows == np.arange(rows)).all()
    assert (seen_cols == np.arange(cols)).all()


@pytest.mark.parametrize(
    "model,Dv,i,j",
    [(P2, D(2), 2, 1), (F0, D(2, 2), 3, 1), (F2, D(1, 3), 2, 1), (P2, D(3), 4, 1)],
)
def test_blockwise_rank_equals_full_rank(model, Dv, i, j):
    blocks = koszul.multidegree_blocks(model, Dv, i, j)
    blockwise = sum(exactla.rank(b.triplets, F).rank for b in blocks if b.triplets.nnz)
    full = exactla.rank(koszul.differential(model, Dv, i, j), F).rank
    assert blockwise == full


@pytest.mark.parametrize(
    "model,Dv,i,j",
    [(P2, D(3), 3, 1), (F0, D(2, 3), 4, 1), (F2, D(1, 3), 2, 1), (F0, D(2, 2), 3, 2)],
)
def test_orbit_grouping_is_sound(model, Dv, i, j):
    blocks = koszul.multidegree_blocks(model, Dv, i, j)
    direct = sum(exactla.rank(b.triplets, F).rank for b in blocks if b.triplets.nnz)
    assert koszul.differential_rank(model, Dv, i, j, 32003) == direct


def test_multidegree_of_element():
    # wedge {x0^2, x0x1} with the monomial x1x2 from R_1 on (P2, O(2))
    md = koszul.multidegree(P2, D(2), (0, 1), monomial=4, j=1)
    basis = variety.section_basis(P2, D(2)).points
    expect = tuple(a + b + c for a, b, c in zip(basis[0], basis[1], basis[4]))
    assert md == (3, 2, 1) == expect


def test_koszul_dimension_examples(table_p2_o2):
    assert koszul.koszul_dimension(P2, D(2), 1, 1) == 6
    assert koszul.koszul_dimension(P2, D(2), 0, 0) == 1
    assert koszul.koszul_dimension(F0, D(2, 2), 3, 1) == 90


def test_koszul_dimension_vanishes_off_range():
    assert koszul.koszul_dimension(P2, D(2), 1, -1) == 0
    assert koszul.koszul_dimension(P2, D(2), 0, -3) == 0
    assert koszul.koszul_dimension(P2, D(2), 99, 1) == 0


@pytest.mark.parametrize(
    "model,Dv",
    [(P1, D(2)), (P2, D(2)), (F0, D(1, 1)), (F2, D(1, 3))],
)
def test_koszul_dimension_boundary_invariants(model, Dv):
    assert koszul.koszul_dimension(model, Dv, 0, 0) == 1
    for i in range(0, 4):
        assert koszul.koszul_dimension(model, Dv, i, -1) == 0
