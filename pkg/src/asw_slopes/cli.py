"""Command-line front end.

Subcommands mirror the library layers: point-side sums (expsum), finite
character L-series (lfun), the bivariate characteristic series (charfn),
slope reports (slopes), curve-level zeta data (zeta), the mechanical
verifier (verify), slope-block factorization with the weight law
(eigencurve), and histogram cache management (cache).

Exit codes: 0 success, 1 a verification claim failed, 2 precision or
budget exhausted, 3 configuration problems (including bad usage).
Polynomials on the command line are comma-separated and written leading
coefficient first, the conventional written order: --f 1,0,0,0 is x^3.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import expsum, tower
from .eigencurve import (
    nested_block_factors,
    observed_polygon,
    slope_factor,
    verify_weight_slope_law,
)
from .errors import ConfigError, PathwayMismatch, PrecisionError, VerificationError
from .newton import hodge_polygon, render_svg, turning_points
from .tower import l_hodge_polygon

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_PRECISION = 2
EXIT_CONFIG = 3


class _Parser(argparse.ArgumentParser):
    # argparse would sys.exit(2) on bad usage; route it to the config code
    def error(self, message):
        raise ConfigError(message)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}")


def _spec(args) -> expsum.TowerSpec:
    f = list(reversed(_ints(args.f)))
    h = tuple(reversed(_ints(args.h))) if getattr(args, "h", None) else None
    return expsum.TowerSpec(args.p, args.a, f, h)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(args, payload: dict) -> None:
    _emit(args, json.dumps(payload, indent=2, sort_keys=True))


def _base_payload(args, spec) -> dict:
    return {
        "p": spec.p,
        "a": spec.a,
        "f": [b.index for b in spec.coeffs],
        "h": list(spec.ctx.h),
    }


def _add_tower_args(sub, digits_default=6):
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--a", type=int, default=1)
    sub.add_argument("--f", required=True, help="defining poly, leading coeff first")
    sub.add_argument("--h", help="base field modulus, leading coeff first")
    sub.add_argument("--digits", type=int, default=digits_default)
    sub.add_argument("--out", help="write output to a file instead of stdout")


# ---------------------------------------------------------------------------


def _cmd_expsum(args) -> int:
    spec = _spec(args)
    payload = _base_payload(args, spec)
    payload.update({"k": args.k, "t_order": args.t_order, "digits": args.digits})
    mod = spec.p**args.digits
    if args.method in ("points", "both"):
        S = expsum.t_adic_sum(spec, args.k, args.t_order, args.digits)
        pts = [c.value % mod for c in S.coeffs]
    if args.method in ("operator", "both"):
        from . import dwork

        S2 = dwork.t_adic_sum_via_operator(spec, args.k, args.t_order, args.digits)
        ops = [c.value % mod for c in S2.coeffs]
    if args.method == "both" and pts != ops:
        raise PathwayMismatch(f"point sum {pts} != operator sum {ops}")
    payload["coefficients"] = pts if args.method != "operator" else ops
    payload["method"] = args.method
    _emit_json(args, payload)
    return EXIT_OK


def _cmd_lfun(args) -> int:
    spec = _spec(args)
    L = expsum.l_series(spec, args.m, c=args.c, punctured=args.punctured)
    payload = _base_payload(args, spec)
    raw = [list(z.coeffs) for z in L.coeffs]
    # coefficients live in Z[zeta_{p^m}]; when that ring is Z itself
    # (p = 2, m = 1) the vectors collapse to plain integers
    rank1 = all(len(v) == 1 for v in raw)
    payload.update(
        {
            "m": args.m,
            "c": args.c,
            "punctured": args.punctured,
            "degree": expsum.l_degree(spec, args.m, args.punctured),
            "coefficients": [v[0] for v in raw] if rank1 else raw,
        }
    )
    if all(all(x == 0 for x in v[1:]) for v in raw):
        payload["rational_coefficients"] = [v[0] for v in raw]
    if not args.punctured:
        poly = tower.l_newton(spec, args.m, c=args.c)
        payload["slopes"] = [[s.numerator, s.denominator] for s in poly.slopes()]
        payload["polygon"] = poly.to_json()
    _emit_json(args, payload)
    return EXIT_OK


def _cmd_charfn(args) -> int:
    spec = _spec(args)
    payload = _base_payload(args, spec)
    mod = spec.p**args.digits
    rows = None
    if args.method in ("points", "both"):
        C = expsum.char_series(spec, args.t_order, args.s_order, args.digits)
        rows = [[c.value % mod for c in col.coeffs] for col in C.coeffs]
    if args.method in ("operator", "both"):
        from . import dwork

        C2 = dwork.char_series_via_operator(spec, args.t_order, args.s_order, args.digits)
        rows2 = [[c.value % mod for c in col.coeffs] for col in C2.coeffs]
        if rows is not None and rows != rows2:
            raise PathwayMismatch("point and operator characteristic series differ")
        if rows is None:
            rows = rows2
            C = C2
    payload.update(
        {
            "method": args.method,
            "t_order": args.t_order,
            "s_order": args.s_order,
            "digits": args.digits,
            "rows": rows,
            "polygon": observed_polygon(C).to_json(),
        }
    )
    _emit_json(args, payload)
    return EXIT_OK


def _cmd_slopes(args) -> int:
    spec = _spec(args)
    poly = tower.l_newton(spec, args.m, c=args.c)
    computed = tower.actual_slopes(spec, args.m, c=args.c)
    m0 = tower.stable_level(spec)
    predicted = tower.predicted_slopes(spec, args.m) if args.m >= m0 else None
    ok = predicted is None or predicted == computed
    if args.format == "svg":
        width = poly.width
        _emit(
            args,
            render_svg(
                [
                    (poly, "#1f77b4", f"level {args.m}"),
                    (l_hodge_polygon(expsum.l_degree(spec, args.m), width), "#d62728", "lower bound"),
                ],
                title=f"p={spec.p} a={spec.a} d={spec.d} m={args.m}",
            ),
        )
        return EXIT_OK
    if args.format == "csv":
        lines = ["slope_num,slope_den,multiplicity,predicted_multiplicity"]
        keys = sorted(set(computed) | set(predicted or {}))
        for s in keys:
            lines.append(
                f"{s.numerator},{s.denominator},{computed.get(s, 0)},"
                f"{(predicted or {}).get(s, 0) if predicted is not None else ''}"
            )
        _emit(args, "\n".join(lines))
        return EXIT_OK
    payload = _base_payload(args, spec)
    payload.update(
        {
            "m": args.m,
            "stable_level": m0,
            "slopes": sorted([s.numerator, s.denominator, n] for s, n in computed.items()),
            "predicted": None
            if predicted is None
            else sorted([s.numerator, s.denominator, n] for s, n in predicted.items()),
            "ok": ok,
            "polygon": poly.to_json(),
        }
    )
    _emit_json(args, payload)
    return EXIT_OK if ok else EXIT_VERIFICATION


def _cmd_zeta(args) -> int:
    spec = _spec(args)
    num = tower.zeta_numerator(spec, args.m)
    payload = _base_payload(args, spec)
    payload.update(
        {
            "m": args.m,
            "genus_times_two": tower.genus_double(spec, args.m),
            "numerator_coefficients": num,
            # zeta = numerator / ((1-s)(1-qs))
            "denominator": [1, -(spec.q + 1), spec.q],
        }
    )
    _emit_json(args, payload)
    return EXIT_OK


def _cmd_verify(args) -> int:
    spec = _spec(args)
    checks = (
        ["periodicity", "hodge", "counts", "turning"]
        if args.check == "all"
        else [args.check]
    )
    report: dict = dict(_base_payload(args, spec))
    ok = True
    if "periodicity" in checks:
        m_max = args.m_max or tower.stable_level(spec) + 1
        rep = tower.verify_periodicity(spec, m_max)
        report["periodicity"] = rep
        ok = ok and rep["ok"]
    if "hodge" in checks:
        m_max = args.m_max or tower.stable_level(spec) + 1
        hs = [tower.verify_hodge(spec, m) for m in range(1, m_max + 1)]
        report["hodge"] = hs
        ok = ok and all(h["ok"] for h in hs)
    if "counts" in checks:
        rows = []
        for m in range(1, min(2, args.m_max or 2) + 1):
            for k in (1, 2):
                rows.append(tower.cross_check_counts(spec, m, k))
        report["counts"] = rows
        ok = ok and all(r["ok"] for r in rows)
    if "turning" in checks:
        report["turning"] = _verify_turning(spec, args)
        ok = ok and report["turning"]["ok"]
    report["ok"] = ok
    if args.format == "svg" and "turning" in checks:
        _emit(args, report["turning"].pop("svg"))
        return EXIT_OK if ok else EXIT_VERIFICATION
    for section in ("turning",):
        if section in report and "svg" in report[section]:
            del report[section]["svg"]
    _emit_json(args, report)
    return EXIT_OK if ok else EXIT_VERIFICATION


def _verify_turning(spec, args) -> dict:
    s_order = args.s_order or 2 * spec.d + 1
    t_order = args.t_order or (
        1 + (spec.p - 1) * (s_order * (s_order - 1)) // (2 * spec.d)
    )
    C = expsum.char_series(spec, t_order, s_order, args.digits)
    poly = observed_polygon(C)
    bound = hodge_polygon(spec.d, poly.width).rescale(
        Fraction(spec.p - 1), source="scaled lower bound"
    )
    rows = []
    ok = poly.dominates(bound)
    for x, y in turning_points(spec.d, poly.width):
        want = Fraction(spec.p - 1) * y
        got = poly.y_at(x)
        hit = got == want
        ok = ok and hit
        rows.append({"x": x, "expected": [want.numerator, want.denominator], "ok": hit})
    svg = render_svg(
        [(poly, "#1f77b4", "observed"), (bound, "#d62728", "lower bound")],
        title=f"T-adic polygon p={spec.p} d={spec.d}",
    )
    return {"ok": ok, "touch": rows, "polygon": poly.to_json(), "svg": svg}


def _ceil(x: Fraction) -> int:
    return int(-(-x // 1))


def _factor_json(factor, p: int) -> dict:
    return {
        "coefficients": [
            [c.value % p**factor.digits for c in ts.coeffs] for ts in factor.coeffs
        ],
        "t_digits": factor.t_digits,
        "p_digits": factor.digits,
    }


def _cmd_eigencurve(args) -> int:
    spec = _spec(args)
    d = spec.d
    e0 = spec.a * (spec.p - 1) * spec.p ** (tower.stable_level(spec) - 1)
    alphas = tower.base_slopes(spec)
    s_alpha = sum(alphas, Fraction(0, 1))
    gap = e0 * (1 - (max(alphas) if alphas else Fraction(0, 1)))
    if gap <= 0:
        raise ConfigError("no slope gap at block vertices for this tower")
    user_levels = _ints(args.levels) if args.levels else None
    payload = _base_payload(args, spec)
    payload["digits"] = args.digits

    # T-adic hull height at the block corner x = i*d: block slopes are
    # e0*(i-1) once and e0*(i-1+alpha_j) each, so corners are integral
    def corner_y(i: int) -> int:
        return _ceil(e0 * (Fraction(d * i * (i - 1), 2) + i * s_alpha))

    def pick_levels(h_max: int, p_digits: int) -> list[int]:
        # smallest annulus level whose cap p_digits*e exceeds the deepest
        # specialized reading, so every hull point stays exact
        if user_levels is not None:
            return user_levels
        m = tower.stable_level(spec)
        while p_digits * (spec.p - 1) * spec.p ** (m - 1) <= h_max:
            m += 1
        return [m, m + 1]

    if args.vertex is not None:
        vertex = args.vertex
        if vertex <= 0 or vertex % d:
            raise ConfigError(f"vertex {vertex} must be a positive multiple of d = {d}")
        i = vertex // d
        # honest depth after the rescaled split is gap*(t_order - y_v)/beta_hi,
        # less the left factor's own T-content under the rescaling; two spare
        # orders cover that loss at the gammas the chooser actually picks
        beta_hi = Fraction(e0 * i)
        t_order = args.t_order or _ceil(args.t_digits * beta_hi / gap + corner_y(i)) + 2
        # lanes above the vertex must cover the window even at the flattest
        # gamma the chooser may fall back to (63/64 of the gap)
        s_order = args.s_order or vertex + _ceil(t_order / (gap * Fraction(63, 64))) + 1
        C = expsum.char_series(spec, t_order, s_order, args.digits)
        factor = slope_factor(C, vertex, args.t_digits)
        levels = pick_levels(corner_y(i), factor.digits)
        law = verify_weight_slope_law(spec, factor, list(range(1, i + 1)), levels)
        payload.update(
            {
                "mode": "vertex",
                "vertex": vertex,
                "t_order": t_order,
                "s_order": s_order,
                "levels": levels,
                "gamma": [factor.gamma.numerator, factor.gamma.denominator],
                "factor": _factor_json(factor, spec.p),
                "law": law,
            }
        )
        _emit_json(args, payload)
        return EXIT_OK if law["ok"] else EXIT_VERIFICATION

    count = args.components
    if count < 1:
        raise ConfigError("need at least one component")
    # anchor the hull one column past the last corner so x = count*d is interior
    t_order = args.t_order or corner_y(count) + e0 * count + 2
    s_order = args.s_order or count * d + 1
    C = expsum.char_series(spec, t_order, s_order, args.digits)
    factors, stats = nested_block_factors(C, d, count)
    levels = pick_levels(corner_y(count) - corner_y(count - 1), C.min_prec())
    blocks = []
    all_ok = True
    for i, factor in enumerate(factors, start=1):
        law = verify_weight_slope_law(spec, factor, i, levels)
        all_ok = all_ok and law["ok"]
        entry = _factor_json(factor, spec.p)
        entry.update({"block": i, "law": law})
        blocks.append(entry)
    payload.update(
        {
            "mode": "components",
            "components": count,
            "t_order": t_order,
            "s_order": s_order,
            "levels": levels,
            "engine": stats,
            "blocks": blocks,
        }
    )
    _emit_json(args, payload)
    return EXIT_OK if all_ok else EXIT_VERIFICATION


def _cmd_cache(args) -> int:
    d = expsum.cache_dir()
    if args.action == "list":
        entries = []
        if os.path.isdir(d):
            for name in sorted(os.listdir(d)):
                if name.endswith(".json"):
                    entries.append(
                        {"name": name, "bytes": os.path.getsize(os.path.join(d, name))}
                    )
        _emit_json(args, {"dir": d, "entries": entries})
        return EXIT_OK
    removed = 0
    if os.path.isdir(d):
        for name in os.listdir(d):
            if name.endswith(".json"):
                os.remove(os.path.join(d, name))
                removed += 1
    _emit_json(args, {"dir": d, "removed": removed})
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    top = _Parser(prog="asw-slopes", description=__doc__)
    subs = top.add_subparsers(dest="command", required=True)

    s = subs.add_parser("expsum", parents=[], help="T-adic exponential sum over one extension")
    _add_tower_args(s)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--t-order", type=int, default=8)
    s.add_argument("--method", choices=["points", "operator", "both"], default="points")
    s.set_defaults(func=_cmd_expsum)

    s = subs.add_parser("lfun", help="L-series of one finite character")
    _add_tower_args(s)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--c", type=int, default=1)
    s.add_argument("--punctured", action="store_true")
    s.set_defaults(func=_cmd_lfun)

    s = subs.add_parser("charfn", help="bivariate characteristic series")
    _add_tower_args(s)
    s.add_argument("--t-order", type=int, default=8)
    s.add_argument("--s-order", type=int, default=6)
    s.add_argument("--method", choices=["points", "operator", "both"], default="points")
    s.set_defaults(func=_cmd_charfn)

    s = subs.add_parser("slopes", help="slopes of a level against the periodic prediction")
    _add_tower_args(s)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--c", type=int, default=1)
    s.add_argument("--format", choices=["json", "csv", "svg"], default="json")
    s.set_defaults(func=_cmd_slopes)

    s = subs.add_parser("zeta", help="zeta numerator of the level-m curve")
    _add_tower_args(s)
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=_cmd_zeta)

    s = subs.add_parser("verify", help="run the mechanical checks")
    _add_tower_args(s)
    s.add_argument(
        "--check",
        choices=["periodicity", "hodge", "counts", "turning", "all"],
        default="all",
    )
    s.add_argument("--m-max", type=int)
    s.add_argument("--t-order", type=int)
    s.add_argument("--s-order", type=int)
    s.add_argument("--format", choices=["json", "svg"], default="json")
    s.set_defaults(func=_cmd_verify)

    s = subs.add_parser("eigencurve", help="slope-block factors and the weight law")
    _add_tower_args(s, digits_default=4)
    s.add_argument(
        "--components", type=int, default=1, help="peel this many leading blocks"
    )
    s.add_argument(
        "--vertex", type=int, help="rescaled split through this vertex instead"
    )
    s.add_argument(
        "--t-digits", type=int, default=2, help="certified T-digits (vertex mode)"
    )
    s.add_argument("--t-order", type=int)
    s.add_argument("--s-order", type=int)
    s.add_argument("--levels", help="character levels (conductor exponents), comma-separated")
    s.set_defaults(func=_cmd_eigencurve)

    s = subs.add_parser("cache", help="histogram cache")
    s.add_argument("action", choices=["list", "clear"])
    s.add_argument("--out")
    s.set_defaults(func=_cmd_cache)

    return top


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except VerificationError as err:
        return _fail(err, EXIT_VERIFICATION)
    except PrecisionError as err:
        return _fail(err, EXIT_PRECISION)
    except ConfigError as err:
        return _fail(err, EXIT_CONFIG)


def _fail(err: Exception, code: int) -> int:
    sys.stderr.write(
        json.dumps({"error": type(err).__name__, "message": str(err)}) + "\n"
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
