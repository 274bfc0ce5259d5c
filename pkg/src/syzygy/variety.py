"""Toric surface models: divisor classes, monomial section bases, intersection theory.

Two families of varieties carry explicit monomial models here: projective
space P^n (sections of O(d) are degree-d monomials) and Hirzebruch surfaces
F_e (sections of a*C0 + b*f are lattice points of a trapezoid).  Everything
downstream -- Koszul matrices, Betti tables -- is built on the bases fixed in
this module, so their ordering is frozen and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union


class NotBasePointFree(ValueError):
    """The divisor class has base points (or is not effective)."""


class NotAmple(ValueError):
    """The divisor class is not ample."""


class EmptySystem(ValueError):
    """The linear system contains no curve."""


class DimensionMismatch(ValueError):
    """Operation requires a surface model."""


class NonPolynomialHilbert(ArithmeticError):
    """Finite differences of h^0(kD) failed to stabilize within the cap."""


@dataclass(frozen=True)
class ProjectiveSpace:
    """P^n with Picard group Z*H."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"projective space needs n >= 1, got {self.n}")

    @property
    def dimension(self) -> int:
        return self.n

    @property
    def tag(self) -> str:
        return f"P:{self.n}"


@dataclass(frozen=True)
class Hirzebruch:
    """Hirzebruch surface F_e: section C0 with C0^2 = -e, fiber f."""

    e: int

    def __post_init__(self) -> None:
        if self.e < 0:
            raise ValueError(f"Hirzebruch surface needs e >= 0, got {self.e}")

    @property
    def dimension(self) -> int:
        return 2

    @property
    def tag(self) -> str:
        return f"F:{self.e}"


SurfaceModel = Union[ProjectiveSpace, Hirzebruch]


@dataclass(frozen=True)
class Divisor:
    """A divisor class: (d,) on P^n, (a, b) in the C0/f basis on F_e."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def scale(self, k: int) -> "Divisor":
        return Divisor(tuple(k * c for c in self.coeffs))

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    @property
    def tag(self) -> str:
        return ",".join(str(c) for c in self.coeffs)


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered monomial basis of H^0(D), as lattice points (exponent vectors)."""

    points: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.points)

    def index(self) -> dict[tuple[int, ...], int]:
        return {p: k for k, p in enumerate(self.points)}


def _check(model: SurfaceModel, D: Divisor) -> None:
    expected = 1 if isinstance(model, ProjectiveSpace) else 2
    if len(D.coeffs) != expected:
        raise ValueError(f"divisor {D.coeffs} does not fit model {model.tag}")


def is_basepoint_free(model: SurfaceModel, D: Divisor) -> bool:
    _check(model, D)
    if isinstance(model, ProjectiveSpace):
        return D.coeffs[0] >= 0
    a, b = D.coeffs
    return a >= 0 and b >= a * model.e


def is_ample(model: SurfaceModel, D: Divisor) -> bool:
    _check(model, D)
    if isinstance(model, ProjectiveSpace):
        return D.coeffs[0] >= 1
    a, b = D.coeffs
    return a >= 1 and b >= a * model.e + 1


def h0(model: SurfaceModel, D: Divisor) -> int:
    """Dimension of the space of global sections (lattice-point count)."""
    _check(model, D)
    if isinstance(model, ProjectiveSpace):
        d = D.coeffs[0]
        return math.comb(model.n + d, model.n) if d >= 0 else 0
    a, b = D.coeffs
    if a < 0:
        return 0
    return sum(max(0, b - k * model.e + 1) for k in range(a + 1))


def _graded_monomials(nvars: int, d: int) -> Iterator[tuple[int, ...]]:
    """Degree-d exponent vectors in graded-lex order (x0-dominant first)."""
    if nvars == 1:
        yield (d,)
        return
    for lead in range(d, -1, -1):
        for rest in _graded_monomials(nvars - 1, d - lead):
            yield (lead,) + rest


def section_basis(model: SurfaceModel, D: Divisor) -> MonomialBasis:
    """Monomial basis of H^0(D) in the frozen order; deterministic across runs."""
    if not is_basepoint_free(model, D):
        raise NotBasePointFree(f"{D.coeffs} is not base point free on {model.tag}")
    if isinstance(model, ProjectiveSpace):
        pts = tuple(_graded_monomials(model.n + 1, D.coeffs[0]))
    else:
        a, b = D.coeffs
        pts = tuple(
            (x, y) for x in range(a + 1) for y in range(b - x * model.e + 1)
        )
    return MonomialBasis(pts)


def multiply(
    model: SurfaceModel, p: tuple[int, ...], q: tuple[int, ...]
) -> tuple[int, ...]:
    """Product of two sections = sum of their lattice points."""
    if len(p) != len(q):
        raise ValueError("lattice points from incompatible section spaces")
    return tuple(x + y for x, y in zip(p, q))


def canonical_class(model: SurfaceModel) -> Divisor:
    if isinstance(model, ProjectiveSpace):
        return Divisor((-(model.n + 1),))
    return Divisor((-2, -2 - model.e))


def intersection_matrix(model: SurfaceModel) -> tuple[tuple[int, ...], ...]:
    """Gram matrix of the intersection pairing on the Picard lattice.

    (H.H) = 1 on P^2; (C0.C0) = -e, (C0.f) = 1, (f.f) = 0 on F_e.
    """
    if model.dimension != 2:
        raise DimensionMismatch(f"{model.tag} is not a surface")
    if isinstance(model, ProjectiveSpace):
        return ((1,),)
    return ((-model.e, 1), (1, 0))


def intersect(model: SurfaceModel, D1: Divisor, D2: Divisor) -> int:
    """Intersection number: the bilinear extension of intersection_matrix."""
    _check(model, D1)
    _check(model, D2)
    gram = intersection_matrix(model)
    return sum(
        D1.coeffs[x] * gram[x][y] * D2.coeffs[y]
        for x in range(len(gram))
        for y in range(len(gram))
    )


def genus_in_system(model: SurfaceModel, D: Divisor) -> int:
    """Genus of a smooth member of |D| by adjunction: (D.(D+K))/2 + 1."""
    if model.dimension != 2:
        raise DimensionMismatch(f"{model.tag} is not a surface")
    if h0(model, D) == 0:
        raise EmptySystem(f"|{D.coeffs}| is empty on {model.tag}")
    if not is_basepoint_free(model, D) or all(c == 0 for c in D.coeffs):
        raise EmptySystem(f"|{D.coeffs}| has no smooth curve on {model.tag}")
    dk = intersect(model, D, D + canonical_class(model))
    assert dk % 2 == 0, "adjunction parity violated"
    return dk // 2 + 1


@lru_cache(maxsize=None)
def _numerator_cached(model: SurfaceModel, D: Divisor, k_cap: int | None) -> tuple[int, ...]:
    r = h0(model, D) - 1
    dim = model.dimension
    window = dim + 2
    # h^0(kD) is a degree-dim polynomial in k for k >= 0, so the (r+1)-fold
    # backward difference vanishes for k > r; the window guards the claim.
    kmax = k_cap if k_cap is not None else r + window
    hvals = [h0(model, D.scale(k)) for k in range(kmax + 1)]
    coeffs = []
    for k in range(kmax + 1):
        acc = 0
        for m in range(min(k, r + 1) + 1):
            acc += (-1) ** m * math.comb(r + 1, m) * hvals[k - m]
        coeffs.append(acc)
    if len(coeffs) < window or any(c != 0 for c in coeffs[-window:]):
        raise NonPolynomialHilbert(
            f"differences of h^0(k*{D.coeffs}) not stable within k <= {kmax}"
        )
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def hilbert_numerator(
    model: SurfaceModel, D: Divisor, k_cap: int | None = None
) -> list[int]:
    """Coefficients of N(t) = H(t) * (1-t)^(r+1), H(t) = sum h^0(kD) t^k.

    Computed by (r+1)-fold finite differencing of h^0(kD); differencing must
    vanish on a trailing window of length dimension+2, else the Hilbert
    function is not polynomial within the cap and NonPolynomialHilbert is
    raised.
    """
    if not is_ample(model, D):
        raise NotAmple(f"{D.coeffs} is not ample on {model.tag}")
    if not is_basepoint_free(model, D):
        raise NotBasePointFree(f"{D.coeffs} is not base point free on {model.tag}")
    return list(_numerator_cached(model, D, k_cap))


def parse_model(text: str) -> SurfaceModel:
    """Parse the frozen variety grammar 'P:<n>' / 'F:<e>'."""
    kind, _, arg = text.partition(":")
    if not arg:
        raise ValueError(f"bad variety spec {text!r}, want P:<n> or F:<e>")
    value = int(arg)
    if kind == "P":
        return ProjectiveSpace(value)
    if kind == "F":
        return Hirzebruch(value)
    raise ValueError(f"unknown variety kind {kind!r}, want P or F")


def parse_divisor(model: SurfaceModel, text: str) -> Divisor:
    """Parse the frozen bundle grammar '<d>' on P^n, '<a>,<b>' on F_e."""
    parts = [int(p) for p in text.split(",")]
    if isinstance(model, ProjectiveSpace):
        if len(parts) != 1:
            raise ValueError(f"bundle on {model.tag} takes one degree, got {text!r}")
    elif len(parts) != 2:
        raise ValueError(f"bundle on {model.tag} takes 'a,b', got {text!r}")
    return Divisor(tuple(parts))
