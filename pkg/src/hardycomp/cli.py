"""Command-line driver: ``hardycomp {singvals,bounds,decay,witness}``.

Exit codes: 0 success, 1 usage/config error, 2 soundness violation,
3 numeric failure.  Errors are reported as a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from hardycomp import certificates, decayfit, galerkin
from hardycomp.symbols import from_spec

log = logging.getLogger("hardycomp")

EXIT_OK, EXIT_USAGE, EXIT_SOUNDNESS, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    """Fixed 17-significant-digit formatting; blank for missing values."""
    return "" if x is None else format(float(x), ".17g")


def load_schema() -> dict:
    return json.loads(resources.files("hardycomp").joinpath("schema/symbol.schema.json").read_text())


def load_symbol(path, seed: int):
    doc = json.loads(Path(path).read_text())
    jsonschema.validate(doc, load_schema())
    return from_spec(doc, rng=seed)


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8", newline="\n")
        log.info("wrote %s", out / name)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_singvals(args) -> int:
    phi = load_symbol(args.symbol, args.seed)
    res = galerkin.approx_numbers(phi, p=args.degree, jobs=args.jobs, max_basis=args.max_basis)
    if res.previous is not None:
        log.info("interlacing vs p-2: %s (max gap %.3g, %d of %d converged)",
                 "ok" if res.interlacing_ok else "VIOLATED", res.max_gap,
                 int(res.converged.sum()), len(res.converged))
    if args.export_matrix:
        if not args.out:
            raise UsageError("--export-matrix requires --out")
        M = galerkin.assemble(phi, p=args.degree, jobs=args.jobs, max_basis=args.max_basis)
        galerkin.export_matrix(M, Path(args.out) / "matrix")
    rows = [(i + 1, fmt(v)) for i, v in enumerate(res.values)]
    _emit(args, "singvals.csv", _csv(["n", "a_n"], rows))
    return EXIT_OK


def _parse_a1(text):
    if text is None or text == "compressed":
        return None
    if text == "tail":
        return "tail"
    return float(text)


def cmd_bounds(args) -> int:
    phi = load_symbol(args.symbol, args.seed)
    certs = [c.strip() for c in args.certificates.split(",") if c.strip()]
    reports, prov = certificates.compute_bounds(
        phi, args.degree, certs, grid_sigma=args.grid_sigma, grid_n=args.grid_n,
        a1=_parse_a1(args.a1), r=args.sup_norm, jobs=args.jobs, rng=args.seed,
        max_basis=args.max_basis)
    header = ["n", "compressed", "lower_weyl", "lower_kernel", "upper_tail", "flags"]
    rows = []
    for rep in reports:
        flags = list(rep.notes)
        if not rep.is_sound():
            flags.append("SANDWICH_VIOLATION")
        rows.append((rep.n, fmt(rep.compressed), fmt(rep.lower_weyl), fmt(rep.lower_kernel),
                     fmt(rep.upper_tail), ";".join(flags)))
    _emit(args, "bounds.csv", _csv(header, rows))
    if args.out:
        _emit(args, "bounds_provenance.json", json.dumps(prov, indent=2, default=float) + "\n")
    if not prov["sound"]:
        raise certificates.SoundnessError(f"lower bound exceeds upper bound at n = {prov['violations']}")
    return EXIT_OK


def _read_singvals(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "a_n" not in rows[0]:
        raise ValueError(f"{path} is not a singular-value CSV (need columns n,a_n)")
    rows.sort(key=lambda r: int(r["n"]))
    return np.array([float(r["a_n"]) for r in rows])


def cmd_decay(args) -> int:
    if args.singvals:
        if args.dim is None:
            raise UsageError("--dim is required with --singvals")
        values, d, source = _read_singvals(args.singvals), args.dim, str(args.singvals)
    elif args.symbol:
        phi = load_symbol(args.symbol, args.seed)
        res = galerkin.approx_numbers(phi, p=args.degree, jobs=args.jobs, max_basis=args.max_basis)
        values, d, source = res.values, args.dim or phi.dim, str(args.symbol)
    else:
        raise UsageError("decay needs --singvals or --symbol")
    fit = decayfit.gamma_estimate(values, d, tuple(args.window) if args.window else None)
    report = fit.to_dict()
    report["nu"] = report["stretch_exponent"]
    report["d"] = d
    report["source"] = source
    report["lens_band"] = list(decayfit.lens_band(d))
    _emit(args, "decay.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_witness(args) -> int:
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    rows = [(n, fmt(galerkin.unboundedness_witness(n))) for n in range(1, args.n_max + 1)]
    _emit(args, "witness.csv", _csv(["n", "ratio"], rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--jobs", type=int, default=1, help="threads for column assembly")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("-v", "--verbose", action="store_true")

    sym = _Parser(add_help=False)
    sym.add_argument("--symbol", help="symbol specification (JSON)")
    sym.add_argument("--degree", type=int, default=10, help="truncation degree p")
    sym.add_argument("--max-basis", type=int, default=galerkin.DEFAULT_MAX_BASIS,
                     help="memory guard on the basis size")

    parser = _Parser(prog="hardycomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("singvals", parents=[common, sym], help="compressed approximation numbers")
    p.add_argument("--export-matrix", action="store_true", help="also dump matrix.bin/matrix.json")
    p.set_defaults(func=cmd_singvals)

    p = sub.add_parser("bounds", parents=[common, sym], help="lower/upper certificates")
    p.add_argument("--certificates", default="weyl,kernel,tail")
    p.add_argument("--grid-sigma", type=float, default=1.0)
    p.add_argument("--grid-n", type=int, default=3)
    p.add_argument("--a1", default=None, help="'compressed' (default), 'tail', or a number")
    p.add_argument("--sup-norm", type=float, default=None, help="override the sampled ||phi||_inf")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("decay", parents=[common, sym], help="decay-rate fit")
    p.add_argument("--singvals", help="CSV produced by 'singvals'")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("witness", parents=[common], help="unboundedness witness for (z1, z1)")
    p.add_argument("--n-max", type=int, default=20)
    p.set_defaults(func=cmd_witness)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if getattr(args, "degree", 1) < 1:
        return _fail(EXIT_USAGE, UsageError("--degree must be >= 1"))
    try:
        return args.func(args)
    except certificates.SoundnessError as exc:
        return _fail(EXIT_SOUNDNESS, exc)
    except (FloatingPointError, OverflowError, np.linalg.LinAlgError, MemoryError) as exc:
        code = EXIT_USAGE if isinstance(exc, galerkin.BasisTooLargeError) else EXIT_NUMERIC
        return _fail(code, exc)
    except (UsageError, ValueError, KeyError, OSError, jsonschema.ValidationError) as exc:
        return _fail(EXIT_USAGE, exc)


if __name__ == "__main__":
    sys.exit(main())
