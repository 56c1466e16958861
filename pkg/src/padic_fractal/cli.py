"""Command-line front end.

Exit codes: 0 pass, 1 tolerance exceeded, 2 parse error, 3 input or model
error, 4 unsupported.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import analysis, tube, zeta
from .errors import InputError, ModelError, PAdicFractalError, UnsupportedError
from .padic import Ball, BallSet, ball_measure, canonical_decomposition
from .strings import load_string, parse_rational

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_MODEL, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4


class ParseError(Exception):
    pass


def fmt(x) -> str:
    """15 significant digits, locale independent."""
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, complex):
        if x.imag == 0:
            return fmt(x.real)
        sign = "+" if x.imag >= 0 or math.isnan(x.imag) else "-"
        return f"{fmt(x.real)}{sign}{fmt(abs(x.imag))}i"
    return f"{x:.15g}"


def num(x):
    """JSON-ready number rounded to 15 significant digits; complex becomes ``[re, im]``."""
    if x is None:
        return None
    if isinstance(x, complex):
        return [num(x.real), num(x.imag)]
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.15g}")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParseError(f"cannot parse {text!r} as a complex number") from None


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: Optional[str] = None
    eps_min: Fraction = Fraction(1, 1024)
    eps_max: Fraction = Fraction(1)
    eps_count: int = 200
    terms: int = 500
    jump_window: float = 0.01
    output: str = "csv"
    out: Optional[str] = None
    seed: int = 0
    tolerance: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.eps_min < self.eps_max:
            raise InputError("need 0 < eps-min < eps-max")
        if self.eps_count < 2:
            raise InputError("eps-count must be at least 2")
        if self.terms < 0:
            raise InputError("terms must be nonnegative")
        if not 0 <= self.jump_window < 0.5:
            raise InputError("jump-window must lie in [0, 0.5)")

    @property
    def grid(self) -> list[Fraction]:
        return tube.log_grid(self.eps_min, self.eps_max, self.eps_count)

    @property
    def policy(self) -> tube.TruncationPolicy:
        return tube.TruncationPolicy(self.terms, self.jump_window)


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padic-fractal",
                                     description="Exact computations with p-adic fractal strings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False, out=True):
        p.add_argument("--string", dest="source", required=True,
                       help="preset name or path to a JSON string spec")
        if grid:
            p.add_argument("--eps-min", type=_rational_arg, default=None)
            p.add_argument("--eps-max", type=_rational_arg, default=Fraction(1))
            p.add_argument("--eps-count", type=int, default=200)
            p.add_argument("--terms", type=int, default=500)
            p.add_argument("--jump-window", type=float, default=0.01)
        if out:
            p.add_argument("--output", choices=("csv", "json"), default="csv")
            p.add_argument("--out", default=None, help="write the table here instead of stdout")

    p = sub.add_parser("decompose", help="canonical maximal-ball decomposition")
    p.add_argument("balls", help="JSON file {p, entries: [[num, den, radiusExp], ...]}")

    p = sub.add_parser("dims", help="complex-dimension lines as JSON lines")
    common(p, out=False)

    p = sub.add_parser("zeta-eval", help="evaluate the geometric zeta function")
    common(p, out=False)
    p.add_argument("--s", required=True)
    p.add_argument("--J", type=int, default=None, help="also report a partial sum of J terms")

    for name, hlp in (("tube-exact", "exact inner-tube volumes on an eps grid"),
                      ("tube-formula", "truncated tube formula on an eps grid"),
                      ("verify-tube", "compare the two and summarize")):
        p = sub.add_parser(name, help=hlp)
        common(p, grid=True)
        if name == "verify-tube":
            p.add_argument("--tol", type=float, default=5e-3)

    p = sub.add_parser("verify-mellin", help="check the Mellin identities")
    common(p)
    p.add_argument("--s", default=None, help="a single point; otherwise --count seeded points")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--J", type=int, default=None)
    p.add_argument("--tol", type=float, default=analysis.MELLIN_TOLERANCE)

    p = sub.add_parser("dim-report", help="abscissa vs Minkowski and growth-rate fits")
    common(p, out=False)
    p.add_argument("--tol", type=float, default=analysis.DIMENSION_TOLERANCE)

    p = sub.add_parser("euler-product", help="partial Euler product vs Dirichlet partial sum")
    p.add_argument("--s", required=True)
    p.add_argument("--Pmax", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    return parser


def _emit(args, header: list[str], rows: list[list], stdout) -> None:
    if args.output == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([[fmt(v) if isinstance(v, (float, complex, Fraction)) else v for v in r]
                          for r in rows])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _config(args) -> RunConfig:
    s = load_string(args.source)
    eps_min = args.eps_min
    if eps_min is None:
        base = s.base if s.base is not None else 2
        eps_min = Fraction(1, base**10)
    return RunConfig(args.command, args.source, eps_min, args.eps_max, args.eps_count, args.terms,
                     args.jump_window, args.output, args.out, tolerance=getattr(args, "tol", None))


def cmd_decompose(args, stdout) -> int:
    """Entries are ``[num, den, radiusExp]`` over the file's ``p``, or ``[num, den, radiusExp, prime]``."""
    try:
        with open(args.balls, encoding="utf-8") as fh:
            data = json.load(fh)
        default_p = data.get("p")
        entries = []
        for entry in data["entries"]:
            a, b, n = (int(v) for v in entry[:3])
            entries.append((Fraction(a, b), n, int(entry[3]) if len(entry) > 3 else default_p))
    except (OSError, ValueError, KeyError, TypeError, IndexError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed ball file: {exc}") from None
    if not entries:
        raise ModelError("empty ball list")
    if any(p is None for _, _, p in entries):
        raise ParseError("ball file needs a prime 'p'")
    result = canonical_decomposition(BallSet(Ball(c, n, p) for c, n, p in entries))
    for b in result:
        stdout.write(json.dumps({"center": str(b.key[1]), "radiusExp": b.radius_exp,
                                 "measure": str(ball_measure(b))}) + "\n")
    stdout.write(json.dumps({"balls": len(result), "total_measure": str(result.total_measure())})
                 + "\n")
    return EXIT_OK


def cmd_dims(args, stdout) -> int:
    s = load_string(args.source)
    if not s.is_lattice:
        return EXIT_OK  # finitely many real lengths: entire zeta function
    dims = zeta.string_dimensions(s)
    for line in dims:
        stdout.write(json.dumps({"realPart": num(line.real_part), "baseImag": num(line.base_imag),
                                 "period": num(line.period), "residue": num(line.residue_base),
                                 "multiplicity": line.multiplicity}) + "\n")
    return EXIT_OK


def cmd_zeta_eval(args, stdout) -> int:
    s = load_string(args.source)
    point = parse_complex(args.s)
    out = {"s": num(point), "value": num(complex(zeta.zeta_value(s, point)))}
    if args.J is not None:
        value, bound = zeta.zeta_partial_sum(s, point, args.J)
        out.update(partial_sum=num(value), tail_bound=num(bound), J=args.J)
    stdout.write(json.dumps(out) + "\n")
    return EXIT_OK


def cmd_tube_exact(args, stdout) -> int:
    cfg = _config(args)
    s = load_string(cfg.source)
    rows = []
    for e in cfg.grid:
        if s.place.is_archimedean:
            rows.append([float(e), float(tube.arch_volume(s, e))])
        else:
            rows.append([float(e), float(tube.thin_volume(s, e)), float(tube.thick_volume(s, e))])
    header = ["epsilon", "V_exact"] if s.place.is_archimedean else ["epsilon", "V_exact", "V_thick"]
    _emit(args, header, rows, stdout)
    return EXIT_OK


def cmd_tube_formula(args, stdout) -> int:
    cfg = _config(args)
    s = load_string(cfg.source)
    grid = cfg.grid
    values = tube.tube_formula_truncated(zeta.string_dimensions(s),
                                         np.array([float(e) for e in grid]), cfg.policy)
    _emit(args, ["epsilon", "V_formula"], [[float(e), float(v)] for e, v in zip(grid, values)],
          stdout)
    return EXIT_OK


def cmd_verify_tube(args, stdout) -> int:
    cfg = _config(args)
    s = load_string(cfg.source)
    report = tube.verify_tube(s, cfg.grid, cfg.policy)
    rows = [[e, v, f, a, r, int(x)] for e, v, f, a, r, x in report.rows()]
    _emit(args, ["epsilon", "V_exact", "V_formula", "abs_err", "rel_err", "excluded"], rows, stdout)
    ok = report.max_rel_err <= cfg.tolerance
    summary = {"maxRelErr": num(report.max_rel_err), "N": report.terms,
               "delta": report.jump_window, "excluded": report.excluded_count,
               "tolerance": cfg.tolerance, "status": "pass" if ok else "fail"}
    # keep stdout a clean table unless the table went to a file
    (stdout if args.out else sys.stderr).write(json.dumps(summary) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def _mellin_points(args, s) -> list[complex]:
    if args.s is not None:
        return [parse_complex(args.s)]
    sigma = zeta.string_abscissa(s)
    lo = max(sigma, 0.0) + 0.2 if math.isfinite(sigma) else 0.2
    if lo >= 2:
        raise InputError("no room for sample points with Re s < 2")
    rng = np.random.default_rng(args.seed)
    return [complex(rng.uniform(lo, 2), rng.uniform(-10, 10)) for _ in range(args.count)]


def cmd_verify_mellin(args, stdout) -> int:
    s = load_string(args.source)
    forms = [("arch", analysis.arch_mellin_check)] if s.place.is_archimedean else \
        [("V", analysis.mellin_check_V), ("N", analysis.mellin_check_N)]
    rows, ok = [], True
    for point in _mellin_points(args, s):
        for form, check in forms:
            try:
                c = check(s, point, args.J, args.tol)
            except analysis.DivergenceError:
                ok = False
                rows.append([form, point, None, None, None, None, None, "diverges"])
                continue
            ok &= c.passed
            rows.append([form, point, c.lhs, c.rhs, c.abs_err, c.pieces, c.tail_bound,
                         "pass" if c.passed else "fail"])
    header = ["form", "s", "lhs", "rhs", "abs_err", "J", "tail_bound", "status"]
    if args.output == "json":
        rows = [[r[0], num(r[1]), num(r[2]), num(r[3]), num(r[4]), r[5], num(r[6]), r[7]]
                for r in rows]
    else:
        rows = [["" if v is None else v for v in r] for r in rows]
    _emit(args, header, rows, stdout)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dim_report(args, stdout) -> int:
    s = load_string(args.source)
    report = analysis.dimension_equality_report(s, args.tol)
    data = report.to_json()
    for key in ("sigma", "tolerance"):
        data[key] = num(data[key])
    for key in ("minkowski", "growth", "content"):
        data[key] = {k: num(v) for k, v in data[key].items()}
    stdout.write(json.dumps(data) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_euler_product(args, stdout) -> int:
    point = parse_complex(args.s)
    product = zeta.partial_euler_product(point, args.Pmax)
    dirichlet = zeta.dirichlet_partial_sum(point, args.nmax)
    stdout.write(json.dumps({"s": num(point), "product": num(product),
                             "dirichlet": num(dirichlet),
                             "difference": num(abs(product - dirichlet))}) + "\n")
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose,
    "dims": cmd_dims,
    "zeta-eval": cmd_zeta_eval,
    "tube-exact": cmd_tube_exact,
    "tube-formula": cmd_tube_formula,
    "verify-tube": cmd_verify_tube,
    "verify-mellin": cmd_verify_mellin,
    "dim-report": cmd_dim_report,
    "euler-product": cmd_euler_product,
}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, stdout)
    except (ParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InputError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except PAdicFractalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
