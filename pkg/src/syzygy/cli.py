"""Command-line surface: betti, profile, predict, verify, sweep.

Variety grammar `P:<n>` / `F:<e>`; bundle grammar `<d>` / `<a>,<b>`.
Exit codes: 0 computed-and-certified, 2 uncertified but complete, 1 error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import betti as betti_mod
from . import cache as cache_mod
from . import exactla, koszul, theory, variety


@dataclass
class JobConfig:
    """Shared run configuration assembled from flags."""

    primes: tuple[int, ...] = exactla.DEFAULT_PRIMES
    jobs: int = 1
    size_cap: int | None = koszul.DEFAULT_SIZE_CAP
    fmt: str = "text"
    cache_dir: str | None = None
    no_cache: bool = False

    def __post_init__(self) -> None:
        if not self.primes:
            raise ValueError("need at least one prime")
        if self.jobs < 1:
            raise ValueError("worker count must be >= 1")


def _config_from(args: argparse.Namespace) -> JobConfig:
    primes = tuple(args.prime) if args.prime else exactla.DEFAULT_PRIMES
    return JobConfig(
        primes=primes,
        jobs=args.jobs if args.jobs else (os.cpu_count() or 1),
        size_cap=args.size_cap,
        fmt=getattr(args, "format", "text"),
        cache_dir=args.cache_dir,
        no_cache=args.no_cache,
    )


def _compute(args: argparse.Namespace, cfg: JobConfig) -> betti_mod.BettiTable:
    model = variety.parse_model(args.variety)
    D = variety.parse_divisor(model, args.bundle)
    rank_cache = cache_mod.cache_from_config(cfg.cache_dir, cfg.no_cache)
    return betti_mod.compute_table(
        model,
        D,
        primes=cfg.primes,
        size_cap=cfg.size_cap,
        jobs=cfg.jobs,
        rank_cache=rank_cache,
    )


def render_table_text(table: betti_mod.BettiTable) -> str:
    cert = "yes" if table.certified else "no"
    head = (
        f"variety={table.variety} bundle={table.bundle} r={table.r} "
        f"j_max={table.j_max} primes={','.join(str(p) for p in table.primes)} "
        f"certified={cert}"
    )
    cells: list[list[str]] = []
    for j in range(table.j_max + 1):
        row = []
        for i in range(table.r + 1):
            row.append("?" if (i, j) in table.holes else str(table.entries.get((i, j), 0)))
        cells.append(row)
    width = max(3, max((len(c) for row in cells for c in row), default=1) + 1)
    lines = [head]
    lines.append("j\\i".ljust(6) + "".join(str(i).rjust(width) for i in range(table.r + 1)))
    for j, row in enumerate(cells):
        lines.append(str(j).ljust(6) + "".join(c.rjust(width) for c in row))
    return "\n".join(lines)


def table_to_json(table: betti_mod.BettiTable) -> str:
    rows: dict[str, dict[str, int]] = {}
    for j in range(table.j_max + 1):
        rows[str(j)] = {
            str(i): table.entries[(i, j)]
            for i in range(table.r + 1)
            if (i, j) not in table.holes
        }
    doc = {
        "variety": table.variety,
        "bundle": table.bundle,
        "r": table.r,
        "certified": table.certified,
        "primes": list(table.primes),
        "rows": rows,
    }
    if table.holes:
        doc["holes"] = sorted([i, j] for (i, j) in table.holes)
    return json.dumps(doc, sort_keys=True)


def table_from_json(text: str) -> betti_mod.BettiTable:
    doc = json.loads(text)
    entries = {
        (int(i), int(j)): b
        for j, row in doc["rows"].items()
        for i, b in row.items()
    }
    holes = frozenset((int(i), int(j)) for i, j in doc.get("holes", []))
    return betti_mod.BettiTable(
        variety=doc["variety"],
        bundle=doc["bundle"],
        r=doc["r"],
        j_max=max(int(j) for j in doc["rows"]),
        entries=entries,
        primes=tuple(doc["primes"]),
        certified=doc["certified"],
        holes=holes,
    )


def render_table_csv(table: betti_mod.BettiTable) -> str:
    lines = ["i,j,beta"]
    for j in range(table.j_max + 1):
        for i in range(table.r + 1):
            val = "?" if (i, j) in table.holes else str(table.entries.get((i, j), 0))
            lines.append(f"{i},{j},{val}")
    return "\n".join(lines)


def cmd_betti(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    table = _compute(args, cfg)
    if cfg.fmt == "json":
        print(table_to_json(table))
    elif cfg.fmt == "csv":
        print(render_table_csv(table))
    else:
        print(render_table_text(table))
    return 0 if table.certified else 2


def cmd_profile(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    table = _compute(args, cfg)
    prof = betti_mod.profile(table)
    if prof.tug > 0:
        verdict = "(M_q) tugs (N_p)"
    elif prof.tug < 0:
        verdict = "(N_p) tugs (M_q)"
    else:
        verdict = "tug of war is balanced"
    line = (
        f"p_max={prof.p_max} q_max={prof.q_max} tug={prof.tug} "
        f"delta={prof.delta} j_max={prof.j_max}"
    )
    if cfg.fmt == "json":
        print(
            json.dumps(
                {
                    "variety": table.variety,
                    "bundle": table.bundle,
                    "p_max": prof.p_max,
                    "q_max": prof.q_max,
                    "tug": prof.tug,
                    "delta": prof.delta,
                    "j_max": prof.j_max,
                    "verdict": verdict,
                },
                sort_keys=True,
            )
        )
    else:
        print(line)
        print(verdict)
        if prof.q_max == 0:
            print("note: q_max=0 means even M_1 fails (reporting convention)")
    return 0 if table.certified else 2


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    table = _compute(args, cfg)
    model = variety.parse_model(args.variety)
    D = variety.parse_divisor(model, args.bundle)
    try:
        checks = theory.verify_instances(table, model, D)
    except theory.UncertifiedTable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    bad = False
    for c in checks:
        status = "PASS" if c.ok else ("FAIL" if c.hard else "MISMATCH")
        print(f"{status} {c.claim}: predicted={c.predicted} observed={c.observed}")
        bad = bad or (c.hard and not c.ok)
    return 1 if bad else 0


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)] if text else []


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    model = variety.parse_model(args.variety)
    rank_cache = cache_mod.cache_from_config(cfg.cache_dir, cfg.no_cache)
    if isinstance(model, variety.ProjectiveSpace):
        if args.d is None:
            print("error: sweep on P:<n> needs --d <range>", file=sys.stderr)
            return 1
        bundles = [variety.Divisor((d,)) for d in _parse_range(args.d)]
    else:
        if args.a is None or args.b is None:
            print("error: sweep on F:<e> needs --a and --b ranges", file=sys.stderr)
            return 1
        bundles = [
            variety.Divisor((a, b))
            for a in _parse_range(args.a)
            for b in _parse_range(args.b)
        ]
    print("a,b,r,p_max,q_max,delta,delta_predicted,match")
    worst = 0
    for D in bundles:
        try:
            table = betti_mod.compute_table(
                model, D, primes=cfg.primes, size_cap=cfg.size_cap, jobs=cfg.jobs,
                rank_cache=rank_cache,
            )
            prof = betti_mod.profile(table)
        except (koszul.SizeCap, betti_mod.TableHasHoles):
            a = D.coeffs[0]
            b = D.coeffs[1] if len(D.coeffs) > 1 else ""
            print(f"{a},{b},?,?,?,?,?,hole")
            worst = max(worst, 2)
            continue
        pred = theory.conjecture_delta(model, D).threshold
        a = D.coeffs[0]
        b = D.coeffs[1] if len(D.coeffs) > 1 else ""
        match = "yes" if pred == prof.delta else "no"
        print(f"{a},{b},{table.r},{prof.p_max},{prof.q_max},{prof.delta},{pred},{match}")
        if not table.certified:
            worst = max(worst, 2)
    return worst


def _frac(text: str) -> Fraction:
    return Fraction(text)


_VALUE_REPORTS = {"delta": "predicted delta", "gonality": "gon_max"}


def _report_lines(rep: theory.BoundReport) -> str:
    hyp = " ".join(f"{k}={v}" for k, v in rep.hypotheses.items())
    lines = [f"theorem={rep.theorem} {hyp}"]
    if not rep.applicable:
        lines.append("not applicable")
    elif rep.threshold is not None:
        label = _VALUE_REPORTS.get(rep.theorem)
        if label:
            lines.append(f"{label}: {rep.threshold}")
        else:
            lines.append(f"threshold: ell >= {rep.threshold}")
    else:
        lines.append(f"verdict: {'satisfied' if rep.verdict else 'not satisfied'}")
    lines.extend(f"note: {n}" for n in rep.notes)
    return "\n".join(lines)


def cmd_predict(args: argparse.Namespace) -> int:
    t = args.theorem

    def need(*names: str) -> list:
        missing = [n for n in names if getattr(args, n.replace("-", "_"), None) is None]
        if missing:
            raise SystemExit(
                f"error: predict {t} needs --{' --'.join(missing)}"
            )
        return [getattr(args, n.replace("-", "_")) for n in names]

    if t == "cm":
        n, q, regk, rho = need("n", "q", "regk", "rho")
        rep = theory.predict_multiple(n, q, regk, rho)
    elif t == "m2":
        lb, b2, h0b = need("lb", "b2", "h0b")
        rep = theory.predict_m2_surface(lb, b2, h0b)
    elif t == "adjoint":
        n, d, q = need("n", "d", "q")
        rep = theory.predict_adjoint_nef(
            theory.NefData(n=n, d=d, b2=args.b2), q
        )
    elif t == "enriques":
        (q,) = need("q")
        rep = theory.enriques_bound(q, args.b2, args.ample)
    elif t == "abelian":
        (q,) = need("q")
        rep = theory.abelian_bound(q, args.b2, args.ample)
    elif t == "rational":
        kdotl, q, gon = need("kdotl", "q", "gon")
        rep = theory.rational_criterion(
            kdotl, q, gon, args.plane_curve, args.g1q
        )
    elif t == "fano":
        n, lam, bn, gon, q = need("n", "lam", "bn", "gon", "q")
        rep = theory.fano_criterion(theory.FanoData(n=n, lam=lam, bn=bn, gon_max=gon), q)
    elif t == "ruled":
        n, g, mu, a, b, q = need("n", "g", "mu-minus", "a", "b", "q")
        rep = theory.ruled_mq_bound(
            theory.RuledData(n=n, g=g, e=args.e if args.e is not None else 0,
                             mu_minus=mu, a=a, b=b),
            q,
        )
    elif t == "butler":
        tt, n, q = need("t", "n", "q")
        rep = theory.butler_multiple(tt, n, q, args.a)
    elif t == "butler-adjoint":
        tt, n, q, e, g = need("t", "n", "q", "e", "g")
        rep = theory.butler_adjoint(tt, n, q, e, g, args.a)
    elif t == "gonality":
        vv, bb = need("variety", "bundle")
        model = variety.parse_model(vv)
        D = variety.parse_divisor(model, bb)
        value = theory.gon_max(model, D)
        notes = ()
        if isinstance(model, variety.Hirzebruch) and model.e == 0 and D.coeffs[0] > D.coeffs[1]:
            notes = ("convention: min(a, b) on F:0; the fixed-ruling value would be a",)
        rep = theory.BoundReport(
            "gonality", {"variety": vv, "bundle": bb}, True, threshold=value, notes=notes
        )
    elif t == "delta":
        vv, bb = need("variety", "bundle")
        model = variety.parse_model(vv)
        D = variety.parse_divisor(model, bb)
        rep = theory.conjecture_delta(model, D)
    elif t == "normgen":
        (d,) = need("d")
        rep = theory.appendix_normal_generation(
            theory.NefData(
                n=2,
                d=d,
                strict_pairing=args.strict_2d,
                weak_pairing=args.weak_2d,
                h0_lambda_ge_4=args.h0lambda4,
            )
        )
    else:
        print(f"error: unknown theorem id {t!r}", file=sys.stderr)
        return 1
    print(_report_lines(rep))
    return 0


THEOREM_IDS = (
    "cm", "m2", "adjoint", "enriques", "abelian", "rational", "fano",
    "ruled", "butler", "butler-adjoint", "gonality", "delta", "normgen",
)


def _add_common(p: argparse.ArgumentParser, with_format: bool = True) -> None:
    p.add_argument("--prime", type=int, action="append", help="repeatable; default 32003 65537")
    p.add_argument("--jobs", type=int, default=None, help="worker count; default all cores")
    p.add_argument("--size-cap", type=int, default=koszul.DEFAULT_SIZE_CAP,
                   help="nonzero guard per unblocked matrix")
    p.add_argument("--cache-dir", default=None, help=f"rank cache dir (or ${cache_mod.ENV_CACHE_DIR})")
    p.add_argument("--no-cache", action="store_true")
    if with_format:
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="syzygy",
        description="Betti tables via Koszul cohomology, syzygy profiles, and bound calculators",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_betti = sub.add_parser("betti", help="compute and render a Betti table")
    p_betti.add_argument("--variety", required=True)
    p_betti.add_argument("--bundle", required=True)
    _add_common(p_betti)
    p_betti.set_defaults(func=cmd_betti)

    p_prof = sub.add_parser("profile", help="p_max/q_max/tug/delta of a table")
    p_prof.add_argument("--variety", required=True)
    p_prof.add_argument("--bundle", required=True)
    _add_common(p_prof)
    p_prof.set_defaults(func=cmd_profile)

    p_ver = sub.add_parser("verify", help="cross-check a computed table against the bounds")
    p_ver.add_argument("--variety", required=True)
    p_ver.add_argument("--bundle", required=True)
    _add_common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="CSV sweep of profiles over a bundle range")
    p_sweep.add_argument("--variety", required=True)
    p_sweep.add_argument("--a", default=None, help="range like 2 or 2..5 (F:<e>)")
    p_sweep.add_argument("--b", default=None, help="range like 2..5 (F:<e>)")
    p_sweep.add_argument("--d", default=None, help="range like 2..4 (P:<n>)")
    _add_common(p_sweep, with_format=False)
    p_sweep.set_defaults(func=cmd_sweep)

    p_pred = sub.add_parser("predict", help="evaluate one closed-form bound")
    p_pred.add_argument("theorem", choices=THEOREM_IDS)
    p_pred.add_argument("--n", type=int)
    p_pred.add_argument("--q", type=int)
    p_pred.add_argument("--regk", type=int)
    p_pred.add_argument("--rho", type=int)
    p_pred.add_argument("--d", type=_frac)
    p_pred.add_argument("--b2", type=int)
    p_pred.add_argument("--bn", type=int)
    p_pred.add_argument("--lb", type=int)
    p_pred.add_argument("--h0b", type=int)
    p_pred.add_argument("--kdotl", type=int)
    p_pred.add_argument("--gon", type=int)
    p_pred.add_argument("--lam", type=int)
    p_pred.add_argument("--g", type=int)
    p_pred.add_argument("--e", type=int)
    p_pred.add_argument("--t", type=int)
    p_pred.add_argument("--a", type=int)
    p_pred.add_argument("--b", type=int)
    p_pred.add_argument("--mu-minus", type=_frac, dest="mu_minus")
    p_pred.add_argument("--ample", action="store_true")
    p_pred.add_argument("--plane-curve", action="store_true", dest="plane_curve")
    p_pred.add_argument("--g1q", action="store_true")
    p_pred.add_argument("--strict-2d", action="store_true", dest="strict_2d")
    p_pred.add_argument("--weak-2d", action="store_true", dest="weak_2d")
    p_pred.add_argument("--h0lambda4", action="store_true")
    p_pred.add_argument("--variety")
    p_pred.add_argument("--bundle")
    p_pred.set_defaults(func=cmd_predict)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, variety.NotAmple, variety.NotBasePointFree,
            variety.EmptySystem, variety.DimensionMismatch,
            variety.NonPolynomialHilbert, exactla.FieldFailure,
            theory.DimensionTooSmall, theory.HypothesisViolation,
            betti_mod.TableHasHoles, koszul.SizeCap) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
