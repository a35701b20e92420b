"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import experiments as ex
from .automorphic import (DataError, TruncationError, eisenstein, load_maass_forms, maass_eval,
                          weyl_sum_eisenstein)
from .counting import CountQuery, brute_force_count, count, heegner_error_average
from .halfplane import Point
from .kernels import (HALF_I, KernelSpec, radius_from_X, sht_ball, sht_numeric, sht_smoothed)
from .qforms import DiscriminantError, heegner_points
from .spectral import EigenvalueFileError, load_eigenvalues, luo_sarnak_shape, spectral_exp_sum
from . import specfun

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------


def parse_point(text: str) -> Point:
    try:
        return Point.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "").lower()
    if s in ("i/2", "0.5i", ".5i"):
        return HALF_I
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from None


def parse_grid(text: str) -> list[float]:
    """"a,b,c" or "log:lo:hi:n" or "lin:lo:hi:n"."""
    try:
        if text.startswith(("log:", "lin:")):
            kind, lo, hi, n = text.split(":")
            f = np.geomspace if kind == "log" else np.linspace
            return [float(v) for v in f(float(lo), float(hi), int(n))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}") from None


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse integer list {text!r}") from None


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like -10000:-3, got {text!r}") from None


def parse_sign(text: str) -> int:
    if text in ("+", "plus", "+1", "1"):
        return 1
    if text in ("-", "minus", "-1"):
        return -1
    raise argparse.ArgumentTypeError("sign must be + or -")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _num(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def _emit_record(args, record: dict):
    """A single result: JSON with --format json (or --json), else key = value lines."""
    fmt = "json" if getattr(args, "json", False) else args.format
    if fmt == "json":
        text = json.dumps({k: _num(v) for k, v in record.items()}, indent=1) + "\n"
    elif fmt == "csv":
        res = ex.ExperimentResult(args.command, [{k: (v if not isinstance(v, complex) else repr(v)) for k, v in record.items()}], {})
        ex.emit(res, args.out, "csv")
        return
    else:
        text = "".join(f"{k} = {_fmt_val(v)}\n" for k, v in record.items())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_val(v):
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}i"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _emit_table(args, result: ex.ExperimentResult):
    fmt = args.format if args.format in ("csv", "json") else "csv"
    ex.emit(result, args.out, fmt)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_heegner(args):
    hs = heegner_points(args.D)
    if args.json or args.format == "json":
        text = json.dumps(hs.to_json()) + "\n"
    else:
        lines = [f"D = {hs.D}", f"h = {hs.h}"]
        for f, p in zip(hs.forms, hs.points):
            lines.append(f"({f.a},{f.b},{f.c})  {p.x:.17g}{p.y:+.17g}i")
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_count(args):
    q = CountQuery(args.z, args.w, args.X)
    r = count(q)
    rec = {"z": str(args.z), "w": str(args.w), "X": args.X, "count": r.count, "main_term": r.main_term,
           "error": r.error}
    if args.oracle:
        rec["oracle"] = brute_force_count(q)
        rec["agree"] = rec["oracle"] == r.count
    _emit_record(args, rec)
    return EXIT_OK if rec.get("agree", True) else EXIT_NUMERIC


def cmd_error_avg(args):
    e = heegner_error_average(args.D, args.X, args.weights)
    _emit_record(args, {"D": args.D, "X": args.X, "error_average": e})


def cmd_sht(args):
    v = sht_ball(args.R, args.t)
    rec = {"R": args.R, "t": args.t, "h": v}
    if args.numeric:
        rec["numeric"] = sht_numeric(KernelSpec.ball(args.R), args.t)
    _emit_record(args, rec)


def cmd_sht_smoothed(args):
    Y = radius_from_X(args.X)
    v = sht_smoothed(Y, args.delta, args.sign, args.t)
    rec = {"X": args.X, "Y": Y, "delta": args.delta, "sign": "+" if args.sign > 0 else "-", "t": args.t, "h": v}
    status = EXIT_OK
    if args.check_product:
        num = sht_numeric(KernelSpec.smoothed(Y, args.delta, args.sign), args.t)
        scale = sht_smoothed(Y, args.delta, args.sign, HALF_I)
        rec["numeric"] = num
        rec["rel_diff"] = abs(num - v) / abs(scale)
        rec["product_ok"] = rec["rel_diff"] < 1e-5
        status = EXIT_OK if rec["product_ok"] else EXIT_NUMERIC
    _emit_record(args, rec)
    return status


def cmd_eisenstein(args):
    _emit_record(args, {"z": str(args.z), "t": args.t, "E": eisenstein(args.z, args.t)})


def cmd_weylsum(args):
    r = weyl_sum_eisenstein(args.D, args.t)
    _emit_record(args, {"D": r.D, "t": r.t, "direct": r.direct, "formula": r.formula, "residual": r.residual,
                        "weighted_residual": r.weighted_residual, "units_ambiguous": r.units_ambiguous})


def cmd_maass_eval(args):
    forms = load_maass_forms(args.file)
    if not 0 <= args.index < len(forms):
        raise UsageError(f"index {args.index} out of range (file has {len(forms)} forms)")
    f = forms[args.index]
    _emit_record(args, {"t": f.t, "parity": f.parity, "z": str(args.z), "u": maass_eval(f, args.z)})


def cmd_spec_sum(args):
    E = load_eigenvalues(args.file)
    S = spectral_exp_sum(E, args.T, args.X, threads=args.threads)
    _emit_record(args, {"T": args.T, "X": args.X, "count": E.count(args.T), "S": S, "abs_S": abs(S)})


def cmd_spec_scan(args):
    E = load_eigenvalues(args.file)
    rows = luo_sarnak_shape(E, args.X_grid, args.T_grid)
    _emit_table(args, ex.ExperimentResult("spec-scan", rows, {"source": E.source, "n_values": len(E)}))


def cmd_specfun_eval(args):
    s = args.s
    fn = args.fn
    if fn == "gamma":
        v = specfun.cgamma(s)
    elif fn == "zeta":
        v = specfun.zeta(s)
    elif fn == "xi":
        v = specfun.xi(s)
    elif fn == "hurwitz":
        v = specfun.hurwitz_zeta(s, args.q)
    elif fn == "L":
        v = specfun.dirichlet_l(s, args.D)
    elif fn == "K":
        v = specfun.kbessel(s, args.y)
    elif fn == "J1":
        v = float(specfun.bessel_j1_ratio(s.real))
    else:  # 2F1
        v = specfun.gauss_2f1(args.a, args.b, args.c, s)
    _emit_record(args, {"fn": fn, "arg": s, "value": complex(v)})


def _scan_config(args) -> ex.ExperimentConfig:
    kind = args.command
    over = {}
    for name in ("D_list", "X_grid", "t_grid", "D_range", "sample", "delta", "grid", "y_max"):
        v = getattr(args, name, None)
        if v is not None:
            over[name] = v
    if getattr(args, "check_sandwich", False):
        over["check_sandwich"] = True
    for name in ("seed", "threads", "out"):
        v = getattr(args, name)
        if v is not None:
            over[name] = v
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
        base.setdefault("kind", kind)
        if base["kind"] != kind:
            raise UsageError(f"config file is for {base['kind']!r}, command is {kind!r}")
        base.update(over)
        return ex.ExperimentConfig.from_dict(base)
    return ex.default_config(kind, **over)


def cmd_scan(args):
    cfg = _scan_config(args)
    if args.dry_run:
        sys.stdout.write(json.dumps(cfg.to_dict(), indent=1) + "\n")
        return EXIT_OK
    result = ex.run(cfg)
    _emit_table(args, result)
    bad = [r for r in result.rows if r.get("status") != "ok"]
    if bad:
        sys.stderr.write(f"{len(bad)} row(s) failed; see the status column\n")
        return EXIT_NUMERIC
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _global_options(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--out", default=d(None), help="output file (default stdout)")
    p.add_argument("--format", choices=("text", "csv", "json"), default=d("text"))
    p.add_argument("--threads", type=int, default=d(1))
    p.add_argument("--config", default=d(None), help="JSON run configuration (flags override it)")
    p.add_argument("--seed", type=int, default=d(None))
    p.add_argument("--dry-run", action="store_true", default=d(False), help="print the resolved config and stop")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heegnerlab", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    common = _Parser(add_help=False)
    _global_options(common, suppress=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("heegner", cmd_heegner, "reduced forms and Heegner points of D")
    p.add_argument("-D", type=int, required=True)
    p.add_argument("--json", action="store_true")

    p = add("count", cmd_count, "exact N(z, w, X)")
    p.add_argument("--z", type=parse_point, required=True)
    p.add_argument("--w", type=parse_point, required=True)
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="also run the brute-force count (X <= 1e4)")

    p = add("error-avg", cmd_error_avg, "average of N(z,z,X) - 3X over Heegner points")
    p.add_argument("-D", type=int, required=True)
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--weights", type=parse_grid, default=None, help="comma-separated per-point weights")

    for name, help_ in (("error-scan", "error averages over a D-list and X-grid"),
                        ("equi-scan", "equidistribution discrepancies"),
                        ("supnorm-scan", "Eisenstein sup-norms over the fundamental domain"),
                        ("weyl-verify", "Weyl-sum identity residuals"),
                        ("class-scan", "class numbers by two methods")):
        p = add(name, cmd_scan, help_)
        p.add_argument("--D-list", dest="D_list", type=parse_int_list)
        p.add_argument("--D-range", dest="D_range", type=parse_range)
        p.add_argument("--sample", type=int)
        p.add_argument("--X-grid", dest="X_grid", type=parse_grid)
        p.add_argument("--t-grid", dest="t_grid", type=parse_grid)
        p.add_argument("--delta", type=float)
        p.add_argument("--grid", type=int)
        p.add_argument("--y-max", dest="y_max", type=float)
        p.add_argument("--check-sandwich", action="store_true")

    p = add("sht", cmd_sht, "transform h_R(t) of the ball kernel")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--t", type=parse_complex, required=True)
    p.add_argument("--numeric", action="store_true", help="also compute the quadrature transform")

    p = add("sht-smoothed", cmd_sht_smoothed, "transform of the smoothed kernels k+ / k-")
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sign", type=parse_sign, required=True)
    p.add_argument("--t", type=parse_complex, required=True)
    p.add_argument("--check-product", action="store_true", help="compare with the quadrature transform")

    p = add("spec-sum", cmd_spec_sum, "S(T, X) = sum_{t_j <= T} X^{i t_j}")
    p.add_argument("--file", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--X", type=float, required=True)

    p = add("spec-scan", cmd_spec_scan, "normalised |S(T, X)| over grids")
    p.add_argument("--file", required=True)
    p.add_argument("--T-grid", dest="T_grid", type=parse_grid, required=True)
    p.add_argument("--X-grid", dest="X_grid", type=parse_grid, required=True)

    p = add("eisenstein", cmd_eisenstein, "E(z, 1/2 + it)")
    p.add_argument("--z", type=parse_point, required=True)
    p.add_argument("--t", type=float, required=True)

    p = add("weylsum", cmd_weylsum, "sum of E over Heegner points against the L-function side")
    p.add_argument("-D", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--json", action="store_true")

    p = add("maass-eval", cmd_maass_eval, "evaluate a Maass form from a data file")
    p.add_argument("--file", required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--z", type=parse_point, required=True)

    p = add("specfun", None, "special-function debugging")
    ssub = p.add_subparsers(dest="specfun_command", parser_class=_Parser, required=True)
    q = ssub.add_parser("eval", parents=[common], help="evaluate one special function")
    q.set_defaults(func=cmd_specfun_eval)
    q.add_argument("--fn", choices=("gamma", "zeta", "xi", "hurwitz", "L", "K", "J1", "2F1"), required=True)
    q.add_argument("--s", type=parse_complex, required=True, help="argument (order nu for K, z for 2F1)")
    q.add_argument("--q", type=float, default=1.0)
    q.add_argument("-D", type=int, default=-4)
    q.add_argument("--y", type=float, default=1.0)
    q.add_argument("--a", type=parse_complex, default=1.0)
    q.add_argument("--b", type=parse_complex, default=1.0)
    q.add_argument("--c", type=parse_complex, default=1.0)
    return parser


_NEG_VALUE = re.compile(r"^-[\d.]")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn "--D-list -4,-23" into "--D-list=-4,-23" so argparse keeps it as a value."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEG_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        rc = args.func(args)
        return EXIT_OK if rc is None else rc
    except (UsageError, DiscriminantError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (OSError, DataError, EigenvalueFileError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except (specfun.PoleError, specfun.DomainError, TruncationError, ZeroDivisionError,
            FloatingPointError, ArithmeticError, RuntimeError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
