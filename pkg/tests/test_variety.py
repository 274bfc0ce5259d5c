from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syzygy import variety
from syzygy.variety import Divisor

from conftest import D, F0, F1, F2, P1, P2

MODELS = [P1, P2, F0, F1, F2]


def brute_h0_hirzebruch(e: int, a: int, b: int) -> int:
    return len([(x, y) for x in range(a + 1) for y in range(b - e * x + 1) if y >= 0])


def test_h0_examples():
    assert variety.h0(P2, D(3)) == 10  # C(5, 2)
    assert variety.h0(F0, D(2, 3)) == 12  # (a+1)(b+1)
    # brute-force lattice enumeration oracle
    assert brute_h0_hirzebruch(2, 2, 5) == 12
    assert variety.h0(F2, D(2, 5)) == 12


def test_h0_negative_classes():
    assert variety.h0(P2, D(-1)) == 0
    assert variety.h0(F0, D(-1, 5)) == 0


@given(a=st.integers(0, 6), b=st.integers(0, 12), e=st.integers(0, 3))
def test_h0_hirzebruch_matches_enumeration(a, b, e):
    assert variety.h0(variety.Hirzebruch(e), D(a, b)) == brute_h0_hirzebruch(e, a, b)


def test_section_basis_examples():
    assert variety.section_basis(P1, D(1)).points == ((1, 0), (0, 1))
    assert variety.section_basis(F0, D(1, 1)).points == ((0, 0), (0, 1), (1, 0), (1, 1))
    pts = variety.section_basis(P2, D(2)).points
    assert len(pts) == 6
    assert pts[0] == (2, 0, 0) and pts[-1] == (0, 0, 2)


def test_section_basis_rejects_base_points():
    with pytest.raises(variety.NotBasePointFree):
        variety.section_basis(F2, D(1, 1))  # needs b >= a*e
    with pytest.raises(variety.NotBasePointFree):
        variety.section_basis(P2, D(-2))


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("k", range(0, 11))
def test_h0_agrees_with_basis_size(model, k):
    base = D(1) if isinstance(model, variety.ProjectiveSpace) else D(1, model.e + 1)
    Dk = base.scale(k)
    assert variety.h0(model, Dk) == len(variety.section_basis(model, Dk))


def test_multiply_examples():
    assert variety.multiply(P2, (1, 1, 0), (2, 0, 0)) == (3, 1, 0)
    assert variety.multiply(F0, (1, 0), (0, 2)) == (1, 2)
    # membership in the target basis on F2 (b >= 8 makes (4,b) bpf)
    target = variety.section_basis(F2, D(4, 8)).index()
    assert variety.multiply(F2, (2, 1), (0, 3)) in target


@given(
    e=st.integers(0, 2),
    a1=st.integers(0, 3), b1=st.integers(0, 3),
    a2=st.integers(0, 3), b2=st.integers(0, 3),
)
@settings(max_examples=40)
def test_multiply_closure(e, a1, b1, a2, b2):
    model = variety.Hirzebruch(e)
    D1, D2 = D(a1, b1 + e * a1), D(a2, b2 + e * a2)
    basis1 = variety.section_basis(model, D1).points
    basis2 = variety.section_basis(model, D2).points
    target = set(variety.section_basis(model, D1 + D2).points)
    products = {variety.multiply(model, p, q) for p in basis1 for q in basis2}
    assert products <= target
    assert len(products) <= len(basis1) * len(basis2)


def test_canonical_class():
    assert variety.canonical_class(P2) == D(-3)
    assert variety.canonical_class(F0) == D(-2, -2)
    assert variety.canonical_class(F2) == D(-2, -4)


def test_intersection_examples():
    assert variety.intersect(F0, D(2, 3), D(1, 0)) == 3
    assert variety.intersect(P2, D(3), D(4)) == 12
    assert variety.intersect(F2, D(1, 2), D(1, 2)) == 2
    # C0^2 = -e, C0.f = 1, f^2 = 0
    assert variety.intersect(F2, D(1, 0), D(1, 0)) == -2
    assert variety.intersect(F2, D(1, 0), D(0, 1)) == 1
    assert variety.intersect(F2, D(0, 1), D(0, 1)) == 0


def test_intersection_matrix():
    assert variety.intersection_matrix(P2) == ((1,),)
    assert variety.intersection_matrix(F2) == ((-2, 1), (1, 0))
    for model in (P2, F0, F1, F2):
        gram = variety.intersection_matrix(model)
        assert all(gram[x][y] == gram[y][x] for x in range(len(gram)) for y in range(len(gram)))
        assert all(isinstance(v, int) for row in gram for v in row)


def test_intersection_needs_surface():
    with pytest.raises(variety.DimensionMismatch):
        variety.intersect(variety.ProjectiveSpace(3), D(1), D(1))
    with pytest.raises(variety.DimensionMismatch):
        variety.intersect(P1, D(1), D(1))


@given(
    a1=st.integers(-5, 5), b1=st.integers(-5, 5),
    a2=st.integers(-5, 5), b2=st.integers(-5, 5),
    a3=st.integers(-5, 5), b3=st.integers(-5, 5),
    e=st.integers(0, 3),
)
@settings(max_examples=60)
def test_intersection_symmetric_bilinear(a1, b1, a2, b2, a3, b3, e):
    model = variety.Hirzebruch(e)
    D1, D2, D3 = D(a1, b1), D(a2, b2), D(a3, b3)
    assert variety.intersect(model, D1, D2) == variety.intersect(model, D2, D1)
    lhs = variety.intersect(model, D1, D2 + D3)
    rhs = variety.intersect(model, D1, D2) + variety.intersect(model, D1, D3)
    assert lhs == rhs


@pytest.mark.parametrize("d", range(1, 9))
def test_genus_plane_curves(d):
    assert variety.genus_in_system(P2, D(d)) == (d - 1) * (d - 2) // 2


def test_genus_examples():
    assert variety.genus_in_system(P2, D(3)) == 1
    assert variety.genus_in_system(F0, D(2, 2)) == 1
    assert variety.genus_in_system(F0, D(1, 7)) == 0


def test_genus_empty_system():
    with pytest.raises(variety.EmptySystem):
        variety.genus_in_system(F0, D(0, 0))


@given(a=st.integers(0, 5), b=st.integers(0, 5), e=st.integers(0, 2))
@settings(max_examples=40)
def test_adjunction_parity(a, b, e):
    model = variety.Hirzebruch(e)
    Dv = D(a, b + a * e)  # base point free
    K = variety.canonical_class(model)
    assert variety.intersect(model, Dv, Dv + K) % 2 == 0


def test_hilbert_numerator_examples():
    assert variety.hilbert_numerator(P2, D(2)) == [1, 0, -6, 8, -3]
    assert variety.hilbert_numerator(P1, D(1)) == [1]
    assert variety.hilbert_numerator(F0, D(1, 1)) == [1, 0, -1]


def test_hilbert_numerator_leading_one_and_degree():
    for model, Dv in [(P2, D(3)), (F0, D(2, 3)), (F2, D(1, 4))]:
        coeffs = variety.hilbert_numerator(model, Dv)
        r = variety.h0(model, Dv) - 1
        assert coeffs[0] == 1
        assert len(coeffs) - 1 <= r


def test_hilbert_numerator_requires_ample():
    with pytest.raises(variety.NotAmple):
        variety.hilbert_numerator(P2, D(0))
    with pytest.raises(variety.NotAmple):
        variety.hilbert_numerator(F2, D(1, 2))


def test_hilbert_numerator_cap_failure():
    with pytest.raises(variety.NonPolynomialHilbert):
        variety.hilbert_numerator(P2, D(3), k_cap=2)


def test_parse_grammar():
    assert variety.parse_model("P:2") == P2
    assert variety.parse_model("F:0") == F0
    model = variety.parse_model("F:2")
    assert variety.parse_divisor(model, "2,5") == D(2, 5)
    assert variety.parse_divisor(P2, "4") == D(4)
    with pytest.raises(ValueError):
        variety.parse_model("X:1")
    with pytest.raises(ValueError):
        variety.parse_divisor(P2, "1,2")
