"""Closed-form sufficient bounds and criteria for syzygy properties.

Every function encodes one theorem-shaped guarantee as exact integer or
rational arithmetic and returns a BoundReport: the echoed hypotheses, an
applicability flag, and either a minimal multiple ell or a boolean verdict.
Bounds are sufficient conditions; verify_instances only flags a table that
contradicts a fired guarantee, never a table that beats the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import betti as betti_mod
from . import variety
from .variety import Divisor, Hirzebruch, ProjectiveSpace, SurfaceModel

Rational = Fraction | int


class DimensionTooSmall(ValueError):
    """The dimension must be at least 2 for the ceiling/floor thresholds."""


class HypothesisViolation(ValueError):
    """A structural hypothesis of the criterion fails."""


class UncertifiedTable(RuntimeError):
    """verify_instances requires a certified table."""


@dataclass
class BoundReport:
    """Outcome of one bound or criterion evaluation."""

    theorem: str
    hypotheses: dict
    applicable: bool
    threshold: int | None = None
    verdict: bool | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.applicable:
            assert self.threshold is None and self.verdict is None


@dataclass(frozen=True)
class RuledData:
    """Numerical data of a line bundle a*C0 + b*f on a projectivized bundle over a curve."""

    n: int
    g: int
    e: int
    mu_minus: Rational
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.n < 2 or self.g < 0:
            raise ValueError("ruled data needs n >= 2 and g >= 0")

    @property
    def k_l(self) -> int:
        return math.comb(self.n + self.a - 1, self.a) - 1


@dataclass(frozen=True)
class FanoData:
    """A Fano of dimension n and index lam with -K = lam * B."""

    n: int
    lam: int
    bn: int
    gon_max: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise HypothesisViolation(f"Fano criterion needs n >= 3, got {self.n}")
        if self.lam < self.n - 1:
            raise HypothesisViolation(
                f"Fano criterion needs index >= n-1 = {self.n - 1}, got {self.lam}"
            )


@dataclass(frozen=True)
class NefData:
    """Adjoint-series data on a variety with nef canonical class.

    d is the exact rational with d*B - K nef; b2/bn is the self-intersection
    when available; the flags assert strict positivity of the listed pairings
    and h0_lambda_ge_4 asserts h^0(K + (n-1)B) >= 4.
    """

    n: int
    d: Rational
    b2: int | None = None
    strict_pairing: bool = False
    weak_pairing: bool = False
    h0_lambda_ge_4: bool = False

    def __post_init__(self) -> None:
        if Fraction(self.d) < 1:
            raise ValueError(f"need d >= 1, got {self.d}")


def ell_ceil(q: int, n: int) -> int:
    """ceil((q+1)/(n-1)): multiples from here on kill the last q weight-one strands."""
    if n <= 1:
        raise DimensionTooSmall(f"need n >= 2, got {n}")
    if q < 1:
        raise ValueError(f"need q >= 1, got {q}")
    return -((q + 1) // -(n - 1))


def ell_floor(q: int, n: int) -> int:
    """floor((q+1)/(n-1)), the adjoint-series counterpart of ell_ceil."""
    if n <= 1:
        raise DimensionTooSmall(f"need n >= 2, got {n}")
    if q < 1:
        raise ValueError(f"need q >= 1, got {q}")
    return (q + 1) // (n - 1)


def predict_multiple(n: int, q: int, reg_k: int, rho: int) -> BoundReport:
    """Thresholds for multiples ell*B from Castelnuovo-Mumford regularity.

    reg_k is the regularity of the canonical class with respect to B (at most
    n+1), rho the regularity of the structure sheaf.  The m_q threshold is
    ceil((q - n + reg_k)/(n - 1)); adding projective normality costs
    max(rho, .).
    """
    if n <= 1:
        raise DimensionTooSmall(f"need n >= 2, got {n}")
    if reg_k > n + 1:
        raise ValueError(f"reg_k cannot exceed n+1 = {n + 1}, got {reg_k}")
    if rho < 0:
        raise ValueError(f"need rho >= 0, got {rho}")
    mq = -((q - n + reg_k) // -(n - 1))
    return BoundReport(
        theorem="cm",
        hypotheses={"n": n, "q": q, "reg_k": reg_k, "rho": rho},
        applicable=True,
        threshold=max(rho, mq),
        notes=(f"m_q from ell >= {mq}; M_q adds projective normality at ell >= {rho}",),
    )


def predict_m2_surface(lb: int, b2: int, h0b: int) -> BoundReport:
    """Surface criterion for m_2 of multiples: (L.B) > 2(B^2), or equality with h^0(B) >= 4."""
    verdict = lb > 2 * b2 or (lb == 2 * b2 and h0b >= 4)
    return BoundReport(
        theorem="m2",
        hypotheses={"LB": lb, "B2": b2, "h0B": h0b},
        applicable=True,
        verdict=verdict,
    )


def predict_adjoint_nef(data: NefData, q: int) -> BoundReport:
    """Minimal ell with K + ell*B satisfying M_q on a variety with nef K.

    Surfaces get the refined floor term 2 + floor((2q+1)/(B^2)) when B^2 is
    supplied (B^2 >= 2 under nef K), else the uniform q+2; in dimension >= 3
    the second term is floor((q+1)/(n-1)).
    """
    d_ceil = math.ceil(Fraction(data.d))
    if data.n == 2:
        if data.b2 is not None:
            if data.b2 < 2:
                raise ValueError(f"surface bound needs B^2 >= 2, got {data.b2}")
            second = 2 + (2 * q + 1) // data.b2
        else:
            second = q + 2
        threshold = max(d_ceil + 2, second)
    else:
        threshold = max(d_ceil + data.n, ell_floor(q, data.n))
    return BoundReport(
        theorem="adjoint",
        hypotheses={"n": data.n, "d": data.d, "q": q, "B2": data.b2},
        applicable=True,
        threshold=threshold,
    )


def enriques_bound(q: int, b2: int | None = None, ample_only: bool = False) -> BoundReport:
    """Minimal ell for M_q of ell*B on an Enriques surface.

    Base-point-free form needs (B^2) >= 6 and gives q-1; the ample-only
    corollary gives 2q-2 unconditionally.
    """
    return _kodaira_zero_bound("enriques", q, b2, 6, ample_only)


def abelian_bound(q: int, b2: int | None = None, ample_only: bool = False) -> BoundReport:
    """Minimal ell for M_q on an abelian or bielliptic surface ((B^2) >= 5 for the bpf form)."""
    return _kodaira_zero_bound("abelian", q, b2, 5, ample_only)


def _kodaira_zero_bound(
    name: str, q: int, b2: int | None, b2_floor: int, ample_only: bool
) -> BoundReport:
    if q < 2:
        raise ValueError(f"need q >= 2, got {q}")
    hyp = {"q": q, "B2": b2, "ample_only": ample_only}
    if ample_only:
        return BoundReport(name, hyp, applicable=True, threshold=2 * q - 2)
    if b2 is None or b2 < b2_floor:
        return BoundReport(
            name,
            hyp,
            applicable=False,
            notes=(f"base-point-free form needs (B^2) >= {b2_floor}",),
        )
    return BoundReport(name, hyp, applicable=True, threshold=q - 1)


def rational_criterion(
    kdotl: int,
    q: int,
    gon_max_value: int,
    plane_curve_flag: bool = False,
    g1q_flag: bool = False,
) -> BoundReport:
    """M_q on a rational surface, by the size of (-K . L) against q.

    Case (-K.L) >= q+2 is an exact criterion: M_q holds iff q <= gon_max.
    The boundary cases (-K.L) = q+1 and = q fail iff q >= gon_max or an
    asserted exceptional configuration holds (a plane-curve embedding of
    degree q+1, resp. a pencil of degree q); those configurations are taken
    as input flags.  Below (-K.L) = q the criterion says nothing.
    """
    if q < 2:
        raise ValueError(f"need q >= 2, got {q}")
    hyp = {
        "KdotL": kdotl,
        "q": q,
        "gon_max": gon_max_value,
        "plane_curve_flag": plane_curve_flag,
        "g1q_flag": g1q_flag,
    }
    if kdotl >= q + 2:
        return BoundReport(
            "rational",
            hyp,
            applicable=True,
            verdict=q <= gon_max_value,
            notes=("exact case: M_q iff q <= gon_max",),
        )
    if kdotl == q + 1:
        fails = q >= gon_max_value or plane_curve_flag
        return BoundReport(
            "rational",
            hyp,
            applicable=True,
            verdict=not fails,
            notes=("boundary case (-K.L) = q+1; plane-curve flag honored",),
        )
    if kdotl == q and q >= 3:
        fails = q >= gon_max_value or g1q_flag
        return BoundReport(
            "rational",
            hyp,
            applicable=True,
            verdict=not fails,
            notes=("boundary case (-K.L) = q; degree-q pencil flag honored",),
        )
    return BoundReport("rational", hyp, applicable=False)


def fano_criterion(data: FanoData, q: int) -> BoundReport:
    """M_q for the primitive bundle on a Fano of index >= n-1."""
    need = Fraction(q - data.n + 4, data.lam - data.n + 2)
    verdict = q <= (data.n - 2) + data.gon_max and Fraction(data.bn) >= max(
        Fraction(3), need
    )
    return BoundReport(
        theorem="fano",
        hypotheses={"n": data.n, "lambda": data.lam, "Bn": data.bn, "gon_max": data.gon_max, "q": q},
        applicable=True,
        verdict=verdict,
    )


def ruled_mq_bound(data: RuledData, q: int) -> BoundReport:
    """M_q for a*C0 + b*f on a projectivized bundle over a curve.

    Sufficient conditions, all exact rational comparisons:
      (1) b + a*mu_minus >= 2g + 1,
      (2) a >= ell_ceil(q, n),
      (3) b + a*mu_minus + (1 - g) >= ell_ceil(q, n).
    Only q with n <= q <= n + k_L - 1 are in range.
    """
    hyp = {
        "n": data.n,
        "g": data.g,
        "e": data.e,
        "mu_minus": data.mu_minus,
        "a": data.a,
        "b": data.b,
        "q": q,
        "k_L": data.k_l,
    }
    if not data.n <= q <= data.n + data.k_l - 1:
        return BoundReport(
            "ruled", hyp, applicable=False, notes=(f"q out of range [{data.n}, {data.n + data.k_l - 1}]",)
        )
    x = Fraction(data.b) + Fraction(data.a) * Fraction(data.mu_minus)
    lq = ell_ceil(q, data.n)
    cond_slope = x >= 2 * data.g + 1
    cond_a = data.a >= lq
    cond_sections = x + (1 - data.g) >= lq
    return BoundReport(
        "ruled",
        hyp,
        applicable=True,
        verdict=cond_slope and cond_a and cond_sections,
        notes=(
            f"slope hypothesis b+a*mu- >= 2g+1: {cond_slope}; "
            f"a >= {lq}: {cond_a}; b+a*mu-+(1-g) >= {lq}: {cond_sections}",
        ),
    )


def butler_multiple(t: int, n: int, q: int, a: int | None = None) -> BoundReport:
    """M_q for a sum of t ample bundles on a ruled variety.

    Sharp form t/n >= ell_ceil(q, n); uniform form t >= 2q + 2.  The q-cap
    q <= n + C(n+a-1, a) - 2 uses a = sum of the C0-coefficients (defaults
    to t, the minimum possible).
    """
    if t < 1:
        raise ValueError(f"need t >= 1, got {t}")
    a_eff = a if a is not None else t
    cap = n + math.comb(n + a_eff - 1, a_eff) - 2
    hyp = {"t": t, "n": n, "q": q, "a": a_eff, "q_cap": cap}
    if q > cap:
        return BoundReport("butler", hyp, applicable=False, notes=("q above the k_L cap",))
    sharp = Fraction(t, n) >= ell_ceil(q, n)
    uniform = t >= 2 * q + 2
    return BoundReport(
        "butler",
        hyp,
        applicable=True,
        verdict=sharp or uniform,
        notes=(f"sharp form t/n >= ell_ceil: {sharp}; uniform form t >= 2q+2: {uniform}",),
    )


def butler_adjoint(t: int, n: int, q: int, e: int, g: int, a: int | None = None) -> BoundReport:
    """M_q for K plus a sum of t ample bundles on a ruled variety."""
    if t < 1:
        raise ValueError(f"need t >= 1, got {t}")
    a_eff = a if a is not None else t
    cap = n + math.comb(n + a_eff - 1, a_eff) - 2
    extra = max(1, e + 1 - g)
    hyp = {"t": t, "n": n, "q": q, "e": e, "g": g, "q_cap": cap}
    if q > cap:
        return BoundReport("butler-adjoint", hyp, applicable=False, notes=("q above the k_L cap",))
    sharp = Fraction(t, n) >= ell_ceil(q, n) + extra
    uniform = t >= 2 * q + 1 + extra
    return BoundReport(
        "butler-adjoint",
        hyp,
        applicable=True,
        verdict=sharp or uniform,
        notes=(
            f"sharp form t/n >= ell_ceil + max(1, e+1-g) = {extra}: {sharp}; "
            f"uniform form t >= 2q+1+{extra}: {uniform}",
        ),
    )


def gon_max(model: SurfaceModel, D: Divisor) -> int:
    """Largest gonality of a smooth curve in |D|.

    d-1 for degree-d curves in the plane; the C0-coefficient a on a
    Hirzebruch surface.  On F_0 the two rulings are symmetric, so min(a, b)
    is used; callers should surface the convention when a > b.
    """
    if model.dimension != 2:
        raise variety.DimensionMismatch(f"{model.tag} is not a surface")
    if variety.h0(model, D) == 0:
        raise variety.EmptySystem(f"|{D.coeffs}| is empty on {model.tag}")
    if isinstance(model, ProjectiveSpace):
        return D.coeffs[0] - 1
    a, b = D.coeffs
    return min(a, b) if model.e == 0 else a


def _gon_ruling(model: SurfaceModel, D: Divisor) -> int:
    # gonality in the fixed-ruling convention (the C0-coefficient on any F_e);
    # this is the convention under which the closed forms below are identities
    if isinstance(model, ProjectiveSpace):
        return D.coeffs[0] - 1
    return D.coeffs[0]


def conjecture_delta(model: SurfaceModel, D: Divisor) -> BoundReport:
    """Predicted length of the mixed-weight strand and predicted p_max.

    General form: delta = h^0(K + D) - gon + 1 with the fixed-ruling gonality
    convention; on F_0 this coincides with the closed form (a-1)(b-2) and
    p_max = 2a + 2b - 3.  The hypothesis (-K . D) >= gon + 2 is echoed.
    """
    if model.dimension != 2:
        raise variety.DimensionMismatch(f"{model.tag} is not a surface")
    kx = variety.canonical_class(model)
    gon = _gon_ruling(model, D)
    h0k = variety.h0(model, kx + D)
    delta = h0k - gon + 1
    r = variety.h0(model, D) - 1
    p_max = (r - 1) - gon - delta
    hyp = {
        "h0(K+L)": h0k,
        "gon": gon,
        "(-K.L) >= gon+2": variety.intersect(model, kx.scale(-1), D) >= gon + 2,
    }
    notes: tuple[str, ...] = ()
    if isinstance(model, Hirzebruch) and model.e == 0:
        a, b = D.coeffs
        closed = (a - 1) * (b - 2)
        assert closed == delta, "closed form out of sync with the general form"
        notes = (f"closed forms: delta = (a-1)(b-2) = {closed}, p_max = 2a+2b-3 = {2*a + 2*b - 3}",)
        if a > b:
            notes += ("ruling convention: gon taken as the C0-coefficient a (> b here)",)
    return BoundReport(
        theorem="delta",
        hypotheses=hyp,
        applicable=True,
        threshold=delta,
        notes=notes + (f"predicted p_max = {p_max}",),
    )


def appendix_normal_generation(data: NefData) -> BoundReport:
    """Minimal ell with K + ell*B normally generated on a surface with nef K.

    The sharper clause ell >= d+1 needs ((2d-1)B - 2K . Lambda) > 0 (the
    strict_pairing flag), or >= 0 (weak_pairing) together with
    h^0(Lambda) >= 4; otherwise ell >= d+2.
    """
    d_ceil = math.ceil(Fraction(data.d))
    first_clause = data.strict_pairing or (data.weak_pairing and data.h0_lambda_ge_4)
    threshold = d_ceil + 1 if first_clause else d_ceil + 2
    return BoundReport(
        theorem="normgen",
        hypotheses={
            "d": data.d,
            "strict_pairing": data.strict_pairing,
            "weak_pairing": data.weak_pairing,
            "h0_lambda_ge_4": data.h0_lambda_ge_4,
        },
        applicable=True,
        threshold=threshold,
    )


# ----------------------------------------------------------------------------
# cross-checking computed tables against the bounds


@dataclass
class InstanceCheck:
    claim: str
    predicted: object
    observed: object
    ok: bool
    hard: bool


def _primitive_multiple(model: SurfaceModel, D: Divisor) -> tuple[Divisor, int] | None:
    """Write D = ell * B with B ample and base point free, ell maximal."""
    g = math.gcd(*D.coeffs) if len(D.coeffs) > 1 else abs(D.coeffs[0])
    if g == 0:
        return None
    B = Divisor(tuple(c // g for c in D.coeffs))
    if variety.is_ample(model, B) and variety.is_basepoint_free(model, B):
        return B, g
    return None


def verify_instances(
    table: betti_mod.BettiTable, model: SurfaceModel, D: Divisor
) -> list[InstanceCheck]:
    """Score a certified table against every applicable bound and conjecture.

    Hard checks (sufficiency or exactness violations): the weight-one corner
    beta_(r-1,r) on surfaces, the multiple-bundle threshold, and the exact
    rational-surface criterion.  The delta conjecture is scored but soft.
    """
    if not table.certified:
        raise UncertifiedTable("verify_instances needs a certified table")
    checks: list[InstanceCheck] = []
    r = table.r

    if model.dimension == 2:
        observed = table.beta(r - 1, 1)
        checks.append(
            InstanceCheck(
                claim="weight-one corner beta_(r-1,r) = 0",
                predicted=0,
                observed=observed,
                ok=observed == 0,
                hard=True,
            )
        )

    split = _primitive_multiple(model, D)
    if split is not None:
        _B, ell = split
        n = model.dimension
        if n >= 2:
            for q in range(1, r):
                if ell < ell_ceil(q, n):
                    continue
                observed = betti_mod.satisfies_mq(table, q)
                checks.append(
                    InstanceCheck(
                        claim=f"multiple bound: ell = {ell} >= ell_ceil({q}, {n}) guarantees m_{q}",
                        predicted=True,
                        observed=observed,
                        ok=observed,
                        hard=True,
                    )
                )

    if model.dimension == 2:
        kdotl = variety.intersect(model, variety.canonical_class(model).scale(-1), D)
        genus = variety.genus_in_system(model, D)
        gon = gon_max(model, D)
        if genus >= 1:
            for q in range(2, r):
                if kdotl < q + 2:
                    continue
                rep = rational_criterion(kdotl, q, gon)
                observed = betti_mod.satisfies_Mq(table, q)
                checks.append(
                    InstanceCheck(
                        claim=f"rational-surface criterion at q={q}: M_q iff q <= gon_max={gon}",
                        predicted=rep.verdict,
                        observed=observed,
                        ok=rep.verdict == observed,
                        hard=True,
                    )
                )

    if model.dimension == 2:
        prof = betti_mod.profile(table)
        rep = conjecture_delta(model, D)
        checks.append(
            InstanceCheck(
                claim="delta conjecture: h0(K+L) - gon + 1",
                predicted=rep.threshold,
                observed=prof.delta,
                ok=rep.threshold == prof.delta,
                hard=False,
            )
        )
    return checks
