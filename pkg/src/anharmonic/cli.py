"""
Command-line interface.

Every subcommand prints one JSON document (or CSV for tabular commands) that
embeds the resolved configuration. Exact rationals are written as
``"num/den"`` strings. Values read from a TOML file given by ``--config``
act as defaults; explicit flags win.

Exit status: 0 on success, 1 when a computation fails (a JSON diagnostic is
printed), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import mpmath

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .algebra import ConstExpr, DEFAULT_DPS, Poly
from .cache import TableCache, fraction_to_str

__all__ = ["build_parser", "main"]

log = logging.getLogger("anharmonic")


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def exact(q) -> object:
    if isinstance(q, ConstExpr):
        return {"symbolic": q.to_json()}
    return fraction_to_str(q)


def num(x, dps: int) -> str:
    return mpmath.nstr(x, dps)


def poly_json(p: Poly) -> dict:
    return {"symbol": p.symbol, "coeffs": [fraction_to_str(c) for c in p.coeffs]}


def _emit(obj, fmt: str, out) -> None:
    if fmt == "csv":
        rows = obj["rows"]
        w = csv.writer(out, lineterminator="\n")
        w.writerow(obj["columns"])
        w.writerows(rows)
    else:
        json.dump(obj, out, indent=2, sort_keys=True)
        out.write("\n")


def _envelope(args, result: dict, provenance: str) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config", "command", "dps_explicit", "_check_failed") and v is not None}
    return {"command": args.command, "config": config, "provenance": provenance, "result": result, "version": __version__}


def _cache(args):
    return TableCache(args.cache_dir) if getattr(args, "cache_dir", None) else None


def _mpf(s: str):
    return mpmath.mpf(s)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_rspt(args):
    from .rspt import rspt_coeffs

    t = rspt_coeffs(args.degree, args.level, args.kmax, _cache(args))
    return _envelope(args, {"coeffs": [exact(c) for c in t.coeffs]}, "exact")


def cmd_bfun(args):
    from .quantize import b_function

    b = b_function(args.degree, args.order, _cache(args))
    return _envelope(args, {"terms": [poly_json(p) for p in b.terms()]}, "exact")


def cmd_afun(args):
    from .quantize import a_fixture

    f = a_fixture(args.degree, args.dps)
    terms = [
        {
            "lattice_index": t.index,
            "poly": poly_json(t.poly),
            "factor": exact(t.factor),
            "source": t.source,
        }
        for t in f.terms
    ]
    result = {
        "leading": num(f.leading, args.dps),
        "printed_leading": num(f.printed_leading, args.dps),
        "depth": f.depth,
        "terms": terms,
        "notes": list(f.notes),
    }
    return _envelope(args, result, "fixture")


def cmd_action(args):
    from .instanton import action_closed_form, action_numeric

    a = action_closed_form(args.degree, args.dps)
    q = action_numeric(args.degree, args.dps)
    with mpmath.workdps(args.dps):
        rel = abs(q - a) / a
        digits = int(-mpmath.log10(rel)) if rel else args.dps
    result = {"closed_form": num(a, args.dps), "numeric": num(q, args.dps), "agreement_digits": digits}
    exact_values = {3: "2/15", 4: "1/3"}
    if args.degree in exact_values:
        result["exact"] = exact_values[args.degree]
    return _envelope(args, result, f"numeric(P={args.dps})")


def cmd_width(args):
    from .instanton import width_leading

    v = width_leading(args.degree, args.level, _mpf(args.g), args.dps)
    return _envelope(args, {"im": num(v, args.dps)}, f"numeric(P={args.dps})")


def cmd_width_series(args):
    from .quantize import one_instanton_width_series

    w = one_instanton_width_series(args.degree, args.level, args.order, _cache(args))
    result = {
        "coeffs": [exact(c) for c in w.coeffs],
        "leading": w.formula(),
        "prefactor_power_of_two": fraction_to_str(w.power_of_two),
        "coupling_power": fraction_to_str(w.coupling_power),
        "lattice_step": fraction_to_str(w.spec.lattice_step),
        "action": num(w.action, args.dps),
    }
    return _envelope(args, result, "exact")


def cmd_largeorder(args):
    from .largeorder import predictor, ratio_diagnostics
    from .rspt import rspt_coeffs

    table = rspt_coeffs(args.degree, args.level, args.kmax, _cache(args))
    pred = predictor(args.degree, args.level, args.depth, args.dps)
    fit = ratio_diagnostics(table, pred)
    rows = []
    for K, ratio in fit.ratios:
        c = table[K]
        with mpmath.workdps(args.dps):
            cval = mpmath.mpf(c.numerator) / c.denominator
        rows.append([K, num(cval, 17), num(pred(K), 17), repr(ratio)])
    if args.format == "csv":
        return {"columns": ["K", "coeff", "predictor", "ratio"], "rows": rows}
    result = {
        "rows": [dict(zip(("K", "coeff", "predictor", "ratio"), r)) for r in rows],
        "fit": {"a": fit.a, "a_err": fit.a_err, "params": list(fit.params), "window": list(fit.window)},
    }
    return _envelope(args, result, f"exact coefficients, numeric predictor(P={args.dps})")


def cmd_dispersion(args):
    from .largeorder import dispersion_moment, predictor

    q = dispersion_moment(args.degree, args.level, args.K, dps=args.dps)
    c = predictor(args.degree, args.level, 0, args.dps)(args.K)
    with mpmath.workdps(args.dps):
        rel = abs(q / c - 1)
    result = {"quadrature": num(q, args.dps), "closed_form": num(c, args.dps), "relative_difference": num(rel, 5)}
    return _envelope(args, result, f"numeric(P={args.dps})")


def _resonance_kwargs(args):
    kw = {}
    if args.thetas:
        kw["thetas"] = [float(t) for t in args.thetas.split(",")]
    if args.dims:
        kw["dims"] = [int(d) for d in args.dims.split(",")]
    if args.dps_explicit:
        kw["dps"] = args.dps
    return kw


def _resonance_row(r):
    return {
        "re": num(r.re, r.dps),
        "im": num(r.im, r.dps),
        "err": num(r.error, 5),
        "theta": num(mpmath.mpf(r.theta), 10),
        "dim": r.dim,
        "precision": r.dps,
    }


def cmd_resonance(args):
    from .numerics import resonance

    r = resonance(args.degree, args.level, _mpf(args.g), **_resonance_kwargs(args))
    return _envelope(args, _resonance_row(r), f"numeric(P={r.dps}, error={num(r.error, 3)})")


def cmd_resonance_scan(args):
    from .numerics import resonance

    rows = []
    for g in args.ladder.split(","):
        r = resonance(args.degree, args.level, _mpf(g), **_resonance_kwargs(args))
        d = _resonance_row(r)
        rows.append([g, d["re"], d["im"], d["err"], d["theta"], d["dim"], d["precision"]])
    columns = ["g", "re", "im", "err", "theta", "dim", "precision"]
    if args.format == "csv":
        return {"columns": columns, "rows": rows}
    return _envelope(args, {"rows": [dict(zip(columns, r)) for r in rows]}, "numeric")


def cmd_borel(args):
    from .numerics import borel_pade
    from .rspt import OscillatorSpec, rspt_coeffs

    spec = OscillatorSpec(args.degree)
    table = rspt_coeffs(spec, args.level, args.kmax, _cache(args))
    b = borel_pade(table.coeffs, spec.rho, args.direction, _mpf(args.g), args.dps)
    result = {
        "re": num(b.value.real, args.dps),
        "im": num(b.value.imag, args.dps),
        "err": num(b.error, 5),
        "direction": num(b.direction, 10),
        "deflection": num(b.deflected, 5),
        "pade": list(b.pade_order),
        "beta": fraction_to_str(spec.rho),
    }
    return _envelope(args, result, f"numeric(P={args.dps}, error={num(b.error, 3)})")


def cmd_instanton_profile(args):
    from .instanton import InstantonProfile, profile_eval

    prof = InstantonProfile(args.degree, args.t0, args.branch)
    lo, hi = args.t_min, args.t_max
    rows = []
    with mpmath.workdps(args.dps):
        for i in range(args.points):
            t = mpmath.mpf(lo) + (mpmath.mpf(hi) - lo) * i / max(1, args.points - 1)
            rows.append([num(t, 10), num(prof.scaled(t), 15), num(profile_eval(prof, t, _mpf(args.g)), 15)])
    columns = ["t", "x_scaled", "q"]
    if args.format == "csv":
        return {"columns": columns, "rows": rows}
    return _envelope(args, {"rows": [dict(zip(columns, r)) for r in rows]}, "exact closed form")


def cmd_check(args):
    from .acceptance import run_suite

    results = run_suite(args.suite)
    rows = [
        {
            "criterion": r.number,
            "title": r.title,
            "passed": r.passed,
            "measured": r.measured,
            "expected": r.expected,
            "tolerance": r.tolerance,
        }
        for r in results
    ]
    for r in results:
        print(r.line(), file=sys.stderr)
    out = _envelope(args, {"checks": rows, "all_passed": all(r.passed for r in results)}, "mixed")
    args._check_failed = not all(r.passed for r in results)
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p, *, level=False, g=False, fmt=("json",)):
    p.add_argument("--degree", "-m", type=int, required=True, help="degree of the anharmonic term")
    if level:
        p.add_argument("--level", "-n", type=int, default=0, help="oscillator level (default 0)")
    if g:
        p.add_argument("-g", "--coupling", dest="g", required=True, help="coupling, decimal string")
    p.add_argument("--format", choices=fmt, default=fmt[0])


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="anharmonic", description=__doc__.split("\n\n")[0].strip())
    top.add_argument("--version", action="version", version=__version__)
    top.add_argument("--config", help="TOML file with default option values")
    top.add_argument("--dps", type=int, default=None, help=f"working precision in digits (default {DEFAULT_DPS})")
    top.add_argument("--cache-dir", help="directory for cached coefficient tables")
    top.add_argument("-v", "--verbose", action="store_true")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--dps", type=int, default=argparse.SUPPRESS, help="working precision in digits")
    shared.add_argument("--cache-dir", default=argparse.SUPPRESS, help="directory for cached coefficient tables")
    sub = top.add_subparsers(dest="command", required=True, metavar="COMMAND")
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[shared], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("rspt", help="exact perturbative coefficients")
    _common(p, level=True)
    p.add_argument("--kmax", type=int, default=10)
    p.set_defaults(func=cmd_rspt)

    p = sub.add_parser("bfun", help="perturbative function B(E, g)")
    _common(p)
    p.add_argument("--order", type=int, default=1)
    p.set_defaults(func=cmd_bfun)

    p = sub.add_parser("afun", help="tabulated instanton function A(E, g)")
    _common(p)
    p.set_defaults(func=cmd_afun)

    p = sub.add_parser("action", help="instanton action, closed form and quadrature")
    _common(p)
    p.set_defaults(func=cmd_action)

    p = sub.add_parser("width", help="leading imaginary part of the resonance energy")
    _common(p, level=True, g=True)
    p.set_defaults(func=cmd_width)

    p = sub.add_parser("width-series", help="one-instanton width correction coefficients")
    _common(p, level=True)
    p.add_argument("--order", type=int, default=1)
    p.set_defaults(func=cmd_width_series)

    p = sub.add_parser("largeorder", help="coefficient ratios against the large-order predictor")
    _common(p, level=True, fmt=("csv", "json"))
    p.add_argument("--kmax", type=int, default=40)
    p.add_argument("--depth", type=int, default=0, help="width corrections included in the predictor")
    p.set_defaults(func=cmd_largeorder)

    p = sub.add_parser("dispersion", help="dispersion-integral moment by quadrature")
    _common(p, level=True)
    p.add_argument("-K", type=int, required=True)
    p.set_defaults(func=cmd_dispersion)

    for name, func, fmt in (
        ("resonance", cmd_resonance, ("json",)),
        ("resonance-scan", cmd_resonance_scan, ("csv", "json")),
    ):
        p = sub.add_parser(name, help="complex-scaling resonance" + (" over a coupling ladder" if "scan" in name else ""))
        if name == "resonance":
            _common(p, level=True, g=True, fmt=fmt)
        else:
            _common(p, level=True, fmt=fmt)
            p.add_argument("--ladder", required=True, help="comma-separated couplings")
        p.add_argument("--thetas", help="comma-separated rotation angles")
        p.add_argument("--dims", help="comma-separated basis sizes")
        p.set_defaults(func=func)

    p = sub.add_parser("borel", help="directional Borel-Pade sum of the perturbation series")
    _common(p, level=True, g=True)
    p.add_argument("--kmax", type=int, default=30)
    p.add_argument("--direction", type=float, default=0.0, help="ray angle in radians")
    p.set_defaults(func=cmd_borel)

    p = sub.add_parser("instanton-profile", help="bounce trajectory samples")
    _common(p, g=True, fmt=("csv", "json"))
    p.add_argument("--t-min", type=float, default=-5.0)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--branch", type=int, choices=(1, -1), default=1)
    p.set_defaults(func=cmd_instanton_profile)

    p = sub.add_parser("check", help="run the acceptance checks")
    p.add_argument("--suite", choices=("fast", "full"), default="fast")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_check)
    return top


def _load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    # sections keep their subcommand names; scalar keys become attribute names
    return {k if isinstance(v, dict) else k.replace("-", "_"): v for k, v in data.items()}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    early = argparse.ArgumentParser(add_help=False)
    early.add_argument("--config")
    pre, _ = early.parse_known_args(argv)
    if pre.config:
        try:
            defaults = _load_config(pre.config)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            parser.error(f"cannot read config {pre.config}: {exc}")
        parser.set_defaults(**{k: v for k, v in defaults.items() if not isinstance(v, dict)})
        for action in parser._subparsers._group_actions:
            for name, subparser in action.choices.items():
                section = defaults.get(name, {})
                flat = {k: v for k, v in defaults.items() if not isinstance(v, dict)}
                subparser.set_defaults(**{**flat, **{k.replace("-", "_"): v for k, v in section.items()}})
                for a in subparser._actions:
                    if a.dest in flat or a.dest in section:
                        a.required = False
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    args.dps_explicit = args.dps is not None
    if args.dps is None:
        args.dps = DEFAULT_DPS
    try:
        result = args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as a diagnostic
        json.dump({"error": type(exc).__name__, "message": str(exc), "command": args.command}, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 1
    buf = io.StringIO()
    _emit(result, getattr(args, "format", "json"), buf)
    sys.stdout.write(buf.getvalue())
    return 1 if getattr(args, "_check_failed", False) else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
