from __future__ import annotations

import pytest

from syzygy import betti, variety

P1 = variety.ProjectiveSpace(1)
P2 = variety.ProjectiveSpace(2)
F0 = variety.Hirzebruch(0)
F1 = variety.Hirzebruch(1)
F2 = variety.Hirzebruch(2)


def D(*coeffs: int) -> variety.Divisor:
    return variety.Divisor(tuple(coeffs))


@pytest.fixture(scope="session")
def table_p2_o2() -> betti.BettiTable:
    return betti.compute_table(P2, D(2))


@pytest.fixture(scope="session")
def table_p2_o3() -> betti.BettiTable:
    return betti.compute_table(P2, D(3))


@pytest.fixture(scope="session")
def table_f0_22() -> betti.BettiTable:
    return betti.compute_table(F0, D(2, 2))


def paper_table(r: int, j_max: int, rows: dict[int, dict[int, int]]) -> betti.BettiTable:
    """Betti table frozen from published values (for property-function tests)."""
    entries = {}
    for j in range(j_max + 1):
        for i in range(r + 1):
            entries[(i, j)] = rows.get(j, {}).get(i, 0)
    entries[(0, 0)] = 1
    return betti.BettiTable(
        variety="paper",
        bundle="paper",
        r=r,
        j_max=j_max,
        entries=entries,
        primes=(32003, 65537),
        certified=True,
    )


# published tables, frozen: {j: {i: beta}}
PAPER_O2 = dict(r=5, j_max=1, rows={1: {1: 6, 2: 8, 3: 3}})
PAPER_O3 = dict(
    r=9, j_max=2,
    rows={1: {1: 27, 2: 105, 3: 189, 4: 189, 5: 105, 6: 27}, 2: {7: 1}},
)
PAPER_O4 = dict(
    r=14, j_max=2,
    rows={
        1: {1: 75, 2: 536, 3: 1947, 4: 4488, 5: 7095, 6: 7920, 7: 6237,
            8: 3344, 9: 1089, 10: 120},
        2: {10: 55, 11: 24, 12: 3},
    },
)
PAPER_F0_22 = dict(
    r=8, j_max=2, rows={1: {1: 20, 2: 64, 3: 90, 4: 64, 5: 20}, 2: {6: 1}}
)
PAPER_F0_23 = dict(
    r=11, j_max=2,
    rows={
        1: {1: 43, 2: 222, 3: 558, 4: 840, 5: 798, 6: 468, 7: 147, 8: 8},
        2: {8: 9, 9: 2},
    },
)


@pytest.fixture
def paper_o3_table() -> betti.BettiTable:
    return paper_table(**PAPER_O3)


@pytest.fixture
def paper_o4_table() -> betti.BettiTable:
    return paper_table(**PAPER_O4)


@pytest.fixture
def paper_f0_23_table() -> betti.BettiTable:
    return paper_table(**PAPER_F0_23)
