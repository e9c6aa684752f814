"""Command-line interface for perfgroups.

Subcommands mirror the library modules::

    perfgroups rootdatum validate|iso|isogeny|dual|weyl|builtin ...
    perfgroups sl2 weights|ext|decomp|weyltype|socle|blocks|fractal|oracle ...
    perfgroups report -p P --out-dir DIR

Examples
--------
    $ perfgroups rootdatum iso --a builtin:SL4 --b builtin:PGL4 -p 2
    $ perfgroups sl2 ext -p 3 --lambda 0 --mu 4 --target simple
    $ perfgroups sl2 fractal -p 3 --max-n 81 --depth 0 -o out.svg

Exit codes
----------
0
    Definite answer (including a ``NotIsomorphic`` verdict or a failed
    validation report, which are reported through the ``status`` field).
1
    Error (bad input file, scalar outside Z[1/p], ...).
2
    ``Unknown`` verdict: the isomorphism search hit its budget.
64
    Usage error.

Output is JSON (sorted keys, two-space indent) unless ``--format table``;
identical argument vectors give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from . import rootdata as rdm
from . import zp_equiv
from .lattice import LatticeError
from .scalars import Localization, ScalarError, format_scalar
from .sl2 import classical, perfect

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# Input helpers


def _load_datum(spec: str, p: Optional[int]) -> rdm.RootDatum:
    kind, _, rest = spec.partition(":")
    if kind == "builtin" and rest:
        return rdm.builtin(rest, p)
    if kind == "file" and rest:
        data = json.loads(Path(rest).read_text())
        rd = rdm.RootDatum.from_json(data)
        if p is not None and rd.p is None:
            rd = rd.with_prime(p)
        elif p is not None and rd.p != p:
            raise zp_equiv.PrimeMismatch(f"{rest} is over p={rd.p}, but -p {p} was given")
        return rd
    raise UsageError(f"root datum source must be builtin:<name> or file:<path>, not {spec!r}")


def _parse_phi(text: str, p: Optional[int]) -> List[List[Fraction]]:
    """``"a,b;c,d"`` (rows separated by ';') or a JSON list of rows."""
    parse = Localization(p).parse if p is not None else Fraction
    text = text.strip()
    if text.startswith("["):
        rows = json.loads(text)
        return [[parse(str(x)) for x in row] for row in rows]
    return [[parse(x) for x in row.split(",")] for row in text.split(";")]


def _scalar(text: str, p: int) -> Fraction:
    return Localization(p).parse(text)


# ---------------------------------------------------------------------------
# Output helpers


def _table_lines(obj, prefix="") -> List[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines += _table_lines(obj[k], f"{prefix}{k}.")
        return lines
    if isinstance(obj, list) and obj and all(isinstance(x, dict) for x in obj):
        keys = sorted({k for x in obj for k in x})
        rows = ["\t".join(keys)] + ["\t".join(_cell(x.get(k, "")) for k in keys) for x in obj]
        return [f"{prefix[:-1]}:"] + ["  " + r for r in rows]
    return [f"{prefix[:-1]}\t{_cell(obj)}"]


def _cell(x) -> str:
    if isinstance(x, list):
        return " ".join(_cell(y) for y in x) if not any(isinstance(y, list) for y in x) else json.dumps(x)
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def render(obj, fmt: str) -> str:
    if fmt == "table":
        if isinstance(obj, dict) and "_table" in obj:
            return obj["_table"]
        return "\n".join(_table_lines(obj)) + "\n"
    return json.dumps(_strip_private(obj), indent=2, sort_keys=True) + "\n"


def _strip_private(obj):
    if isinstance(obj, dict):
        return {k: v for k, v in obj.items() if not k.startswith("_")}
    return obj


def _emit(args, obj) -> None:
    text = render(obj, args.format)
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# rootdatum handlers


def cmd_validate(args) -> int:
    spec = args.a
    if spec.startswith("file:"):
        data = json.loads(Path(spec[5:]).read_text())
        p = data.get("p") if args.p is None else args.p
        parse = Localization(p).parse if p is not None else Fraction
        rd = rdm.RootDatum(
            tuple(tuple(r) for r in data["pairing"]),
            tuple(tuple(parse(str(x)) for x in a) for a in data["roots"]),
            tuple(tuple(parse(str(x)) for x in c) for c in data["coroots"]),
            int(data["positive_count"]), p, data.get("name"),
        )
    else:
        rd = _load_datum(spec, args.p)
    report = rdm.validate(rd)
    out = report.to_json()
    out["status"] = "Valid" if report.passed else "Invalid"
    out["name"] = rd.name
    _emit(args, out)
    return EXIT_OK


def cmd_iso(args) -> int:
    a, b = _load_datum(args.a, args.p), _load_datum(args.b, args.p)
    budget = zp_equiv.SearchBudget(args.coeff_bound, args.exp_bound, args.node_budget)
    verdict = zp_equiv.decide_isomorphism(a, b, budget)
    out = verdict.to_json()
    out.update({"a": a.name, "b": b.name, "p": a.p})
    _emit(args, out)
    return EXIT_UNKNOWN if verdict.status == zp_equiv.UNKNOWN else EXIT_OK


def cmd_isogeny(args) -> int:
    a, b = _load_datum(args.a, args.p), _load_datum(args.b, args.p)
    phi = _parse_phi(args.phi, a.p)
    ok, reasons = zp_equiv.check_isogeny(a, b, phi)
    out: Dict = {"a": a.name, "b": b.name, "p": a.p, "is_isogeny": ok, "reasons": reasons,
                 "is_isomorphism": bool(ok and zp_equiv.check_isomorphism(a, b, phi))}
    if ok and a.p is not None:
        w = zp_equiv.isogeny_witness(a, b, phi)
        out["witness"] = {
            "phi": [[format_scalar(x) for x in r] for r in w.phi],
            "root_bijection": list(w.root_bijection),
            "steinberg_shift": w.steinberg_shift,
            "theta": [list(r) for r in w.theta],
        }
    _emit(args, out)
    return EXIT_OK


def cmd_dual(args) -> int:
    _emit(args, rdm.dual(_load_datum(args.a, args.p)).to_json())
    return EXIT_OK


def cmd_weyl(args) -> int:
    rd = _load_datum(args.a, args.p)
    out = rdm.weyl_group(rd, enumeration_cap=args.cap).to_json()
    out["name"] = rd.name
    _emit(args, out)
    return EXIT_OK


def cmd_builtin(args) -> int:
    if args.name is None:
        _emit(args, {"names": rdm.builtin_names()})
    else:
        _emit(args, rdm.builtin(args.name, args.p).to_json())
    return EXIT_OK


# ---------------------------------------------------------------------------
# sl2 handlers


def cmd_weights(args) -> int:
    n = _scalar(args.n, args.p)
    ws = perfect.weights(n, args.p)
    _emit(args, {"p": args.p, "n": format_scalar(n), "dim": len(ws), "weights": perfect.format_weights(ws)})
    return EXIT_OK


def cmd_ext(args) -> int:
    lam, mu = _scalar(args.lam, args.p), _scalar(args.mu, args.p)
    d = perfect.ext1(lam, mu, args.target, args.p)
    _emit(args, {"p": args.p, "lambda": format_scalar(lam), "mu": format_scalar(mu),
                 "target": args.target, "dim": d})
    return EXIT_OK


def _multiplicity_cmd(args, single, report) -> int:
    lam = _scalar(args.lam, args.p)
    if args.mu is not None:
        mu = _scalar(args.mu, args.p)
        _emit(args, {"p": args.p, "lambda": format_scalar(lam), "mu": format_scalar(mu),
                     "multiplicity": single(lam, mu, args.p)})
    else:
        _emit(args, report(lam, args.p, args.truncation).to_json())
    return EXIT_OK


def cmd_decomp(args) -> int:
    return _multiplicity_cmd(args, perfect.costandard_multiplicity, perfect.costandard_factors)


def cmd_weyltype(args) -> int:
    return _multiplicity_cmd(args, perfect.weyl_type_multiplicity, perfect.weyl_type_factors)


def cmd_socle(args) -> int:
    lam = _scalar(args.lam, args.p)
    _emit(args, perfect.socle_series(lam, args.depth, args.p).to_json())
    return EXIT_OK


def cmd_blocks(args) -> int:
    lam = _scalar(args.lam, args.p)
    out = {"p": args.p, "lambda": format_scalar(lam), "label": perfect.block_label(lam, args.p)}
    if args.mu is not None:
        mu = _scalar(args.mu, args.p)
        out.update({"mu": format_scalar(mu), "mu_label": perfect.block_label(mu, args.p),
                    "same_block": perfect.same_block(lam, mu, args.p)})
    _emit(args, out)
    return EXIT_OK


def cmd_fractal(args) -> int:
    img = perfect.fractal(args.p, args.max_n, args.depth)
    files = []
    if args.output:
        path = Path(args.output)
        if path.suffix == ".pgm":
            path.write_bytes(img.to_pgm())
        else:
            path.write_text(img.to_svg())
        files.append(str(path))
    if args.figure:
        from . import plotting

        plotting.fractal_figure(img, args.figure)
        files.append(str(args.figure))
    out = {"p": args.p, "max_n": args.max_n, "depth": args.depth, "points": len(img.points), "files": files}
    if not args.output and not args.figure:
        out["integer_points"] = [list(x) for x in sorted(img.integer_points())]
    sys.stdout.write(render(out, args.format))
    return EXIT_OK


def cmd_oracle(args) -> int:
    table = classical.decomposition_numbers(args.lambda_max, args.p)
    out = {"p": args.p, "lambda_max": args.lambda_max,
           "entries": [list(r) for r in table.rows()], "_table": table.to_csv()}
    if args.figure:
        from . import plotting

        plotting.decomposition_figure(table, args.figure)
    _emit(args, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    from . import plotting

    p = args.p
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []

    img = perfect.fractal(p, args.max_n, args.depth)
    (out_dir / "fractal.svg").write_text(img.to_svg())
    plotting.fractal_figure(img, out_dir / "fractal.png")
    files += ["fractal.svg", "fractal.png"]

    table = classical.decomposition_numbers(args.lambda_max, p)
    (out_dir / "decomposition.csv").write_text(table.to_csv())
    plotting.decomposition_figure(table, out_dir / "decomposition.png")
    files += ["decomposition.csv", "decomposition.png"]

    grid = []
    for n in range(2, args.n_max + 1):
        v = zp_equiv.decide_isomorphism(rdm.builtin(f"SL{n}", p), rdm.builtin(f"PGL{n}", p))
        cert = v.certificate["invariant"] if v.certificate else ""
        grid.append((n, p, v.status, cert))
    plotting.write_delimited(out_dir / "iso_grid.tsv", ["n", "p", "status", "certificate"], grid)
    plotting.iso_grid_figure([g[:3] for g in grid], out_dir / "iso_grid.png")
    files += ["iso_grid.tsv", "iso_grid.png"]

    ext_rows = [(lam, mu, perfect.ext1(lam, mu, "simple", p), perfect.ext1(lam, mu, "costandard", p))
                for lam in range(args.lambda_max + 1) for mu in range(args.lambda_max + 1)]
    plotting.write_delimited(out_dir / "ext1.csv", ["lambda", "mu", "simple", "costandard"], ext_rows)
    files.append("ext1.csv")

    summary = {"p": p, "out_dir": str(out_dir), "files": sorted(files),
               "isomorphic_n": [g[0] for g in grid if g[2] == zp_equiv.ISOMORPHIC]}
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    sys.stdout.write(render(summary, args.format))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _prime(text: str) -> int:
    from .scalars import is_prime

    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("-o", "--output", help="write the report to this file instead of stdout")

    parser = _Parser(prog="perfgroups", description="Root data over Z[1/p] and perfected SL2.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    rd = top.add_parser("rootdatum", help="root data over Z or Z[1/p]")
    rsub = rd.add_subparsers(dest="command", required=True, parser_class=_Parser)
    rp_opt = _Parser(add_help=False)
    rp_opt.add_argument("-p", type=_prime, default=None, help="invert this prime")

    s = rsub.add_parser("validate", parents=[common, rp_opt], help="check the root datum axioms")
    s.add_argument("--a", required=True, metavar="SRC")
    s.set_defaults(func=cmd_validate)

    for name, func, helptext in (("iso", cmd_iso, "decide isomorphism"),
                                 ("isogeny", cmd_isogeny, "check a candidate isogeny")):
        s = rsub.add_parser(name, parents=[common, rp_opt], help=helptext)
        s.add_argument("--a", required=True, metavar="SRC", help="builtin:<name> or file:<path>")
        s.add_argument("--b", required=True, metavar="SRC")
        s.set_defaults(func=func)
        if name == "iso":
            s.add_argument("--coeff-bound", type=_nonneg, default=8)
            s.add_argument("--exp-bound", type=_nonneg, default=2)
            s.add_argument("--node-budget", type=_nonneg, default=10**6)
        else:
            s.add_argument("--phi", required=True, help='matrix "a,b;c,d" with num/den entries')

    s = rsub.add_parser("dual", parents=[common, rp_opt], help="dual root datum")
    s.add_argument("--a", required=True, metavar="SRC")
    s.set_defaults(func=cmd_dual)

    s = rsub.add_parser("weyl", parents=[common, rp_opt], help="Weyl group order and type")
    s.add_argument("--a", required=True, metavar="SRC")
    s.add_argument("--cap", type=_nonneg, default=10**6, help="enumeration cap")
    s.set_defaults(func=cmd_weyl)

    s = rsub.add_parser("builtin", parents=[common, rp_opt], help="emit a named root datum (or list names)")
    s.add_argument("--name", default=None)
    s.set_defaults(func=cmd_builtin)

    sl2 = top.add_parser("sl2", help="perfected SL2 representation theory")
    ssub = sl2.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = _Parser(add_help=False)
    sp.add_argument("-p", type=_prime, required=True)

    s = ssub.add_parser("weights", parents=[common, sp], help="weights of the simple module L(n)")
    s.add_argument("--n", required=True)
    s.set_defaults(func=cmd_weights)

    s = ssub.add_parser("ext", parents=[common, sp], help="dim Ext^1(L(lambda), T(mu))")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--mu", required=True)
    s.add_argument("--target", choices=("simple", "costandard"), default="simple")
    s.set_defaults(func=cmd_ext)

    for name, func, helptext in (("decomp", cmd_decomp, "composition factors of the costandard module"),
                                 ("weyltype", cmd_weyltype, "composition factors of the Weyl-type module")):
        s = ssub.add_parser(name, parents=[common, sp], help=helptext)
        s.add_argument("--lambda", dest="lam", required=True)
        s.add_argument("--mu", default=None, help="report a single multiplicity")
        s.add_argument("--truncation", type=_nonneg, default=perfect.DEFAULT_TRUNCATION)
        s.set_defaults(func=func)

    s = ssub.add_parser("socle", parents=[common, sp], help="socle series of the costandard module")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--depth", type=_nonneg, default=5)
    s.set_defaults(func=cmd_socle)

    s = ssub.add_parser("blocks", parents=[common, sp], help="block labels")
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--mu", default=None)
    s.set_defaults(func=cmd_blocks)

    s = ssub.add_parser("fractal", parents=[common, sp], help="render the support of simple characters")
    s.add_argument("--max-n", type=_nonneg, default=26)
    s.add_argument("--depth", type=_nonneg, default=0)
    s.add_argument("--figure", default=None, help="also render a matplotlib figure (png/pdf/svg)")
    s.set_defaults(func=cmd_fractal)

    s = ssub.add_parser("oracle", parents=[common, sp], help="classical decomposition numbers")
    s.add_argument("--lambda-max", type=_nonneg, default=30)
    s.add_argument("--figure", default=None, help="heat map of the decomposition matrix")
    s.set_defaults(func=cmd_oracle)

    s = top.add_parser("report", parents=[sp], help="write figures and delimited tables to a directory")
    s.add_argument("--format", choices=("json", "table"), default="json")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--max-n", type=_nonneg, default=26)
    s.add_argument("--depth", type=_nonneg, default=0)
    s.add_argument("--lambda-max", type=_nonneg, default=30)
    s.add_argument("--n-max", type=int, default=8)
    s.set_defaults(func=cmd_report)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"perfgroups: error: {e}\n")
        return EXIT_USAGE
    except (rdm.RootDatumError, ScalarError, LatticeError, zp_equiv.PrimeMismatch,
            perfect.NotStrictlyDominant, classical.UnsupportedPrime, ValueError, KeyError,
            OSError) as e:
        sys.stderr.write(f"perfgroups: error: {type(e).__name__}: {e}\n")
        return EXIT_ERROR


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
