"""Command-line front end.

    kreinq verify    --config run.toml --out report.json
    kreinq scan      --config run.toml --grid -5,5,-5,5,41,41 --out scan.csv
    kreinq spectrum  --config run.toml --interval -2,0 --out spectrum.csv
    kreinq resolvent --config run.toml --z 0,3 --out r.txt
    kreinq demo

Exit status: 0 pass, 1 failure or error, 2 inconclusive (no point of Z_Q found).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path


from .config import RunConfig, load_config, parse_grid, parse_interval, parse_z
from .errors import ConfigParse, EmptyZQ, KreinError
from .krein_extension import (SampleSpec, compare_spectrum, identity_suite, krein_resolvent, reconstruct_operator,
                              spectrum_discrepancy, verify_main_theorem)
from .matrix_io import format_matrix
from .models import lattice_delta, pinned_two_level
from .weyl_q import fmt, rectangular_grid, scan_zq

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    cmd = cfg.command
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if getattr(args, "grid", None):
        kw["grid"] = parse_grid(args.grid)
    if getattr(args, "interval", None):
        kw["interval"] = parse_interval(args.interval)
    if getattr(args, "z", None):
        kw["z"] = parse_z(args.z)
    tol = cfg.tolerances
    if args.tol:
        overrides = {}
        for item in args.tol:
            name, sep, value = item.partition("=")
            if not sep:
                raise ConfigParse(f"--tol expects NAME=VALUE, got {item!r}")
            overrides[name.strip()] = float(value)
        try:
            tol = tol.updated(**overrides)
        except ValueError as exc:
            raise ConfigParse(str(exc)) from exc
    return replace(cfg, command=replace(cmd, **kw), tolerances=tol)


def _load(args) -> RunConfig:
    if not args.config:
        raise ConfigParse("--config is required")
    return _apply_overrides(load_config(args.config), args)


def _error_payload(exc: BaseException) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


def cmd_verify(cfg: RunConfig, out: str | None) -> int:
    doc = {"command": "verify", "status": None, "error": None, "report": None}
    try:
        model, family = cfg.build()
        p = cfg.command
        suite = identity_suite(model, family, SampleSpec(n_pairs=p.n_pairs, seed=p.seed))
        main = verify_main_theorem(model, family, n_samples=p.n_samples, seed=p.seed,
                                   spectral_interval=p.interval)
        report = suite.merged(main)
        doc["report"] = report.to_dict()
        doc["status"] = "pass" if report.passed else "fail"
        code = EXIT_PASS if report.passed else EXIT_FAIL
    except EmptyZQ as exc:
        doc["status"], doc["error"] = "inconclusive", _error_payload(exc)
        code = EXIT_INCONCLUSIVE
    except KreinError as exc:
        doc["status"], doc["error"] = "error", _error_payload(exc)
        code = EXIT_FAIL
    _emit(json.dumps(doc, indent=2) + "\n", out)
    if doc["error"]:
        print(f"verify: {doc['status']}: {doc['error']['type']}: {doc['error']['message']}", file=sys.stderr)
    return code


def cmd_scan(cfg: RunConfig, out: str | None) -> int:
    p = cfg.command
    if p.grid is None:
        raise ConfigParse("scan needs a grid (--grid or [command].grid)")
    model, family = cfg.build()
    result = scan_zq(model, family, rectangular_grid(*p.grid), workers=p.workers)
    _emit(result.to_csv(), out)
    return EXIT_PASS


def cmd_spectrum(cfg: RunConfig, out: str | None) -> int:
    p = cfg.command
    if p.interval is None:
        raise ConfigParse("spectrum needs an interval (--interval or [command].interval)")
    model, family = cfg.build()
    rec = reconstruct_operator(model, family)
    rows = compare_spectrum(model, family, p.interval, n_grid=p.n_grid, rec=rec)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["via_q_root", "via_diagonalization", "discrepancy"])
    for row in rows:
        writer.writerow([fmt(row.via_q_root), fmt(row.via_diagonalization), fmt(row.discrepancy)])
    _emit(buf.getvalue(), out)
    worst = spectrum_discrepancy(rows)
    tolerance = 1e-8 * max(rec.norm, 1.0)
    print(f"max discrepancy {worst:.3e} (tolerance {tolerance:.3e}, {len(rows)} rows)", file=sys.stderr)
    return EXIT_PASS if worst <= tolerance else EXIT_FAIL


def cmd_resolvent(cfg: RunConfig, out: str | None) -> int:
    p = cfg.command
    if p.z is None:
        raise ConfigParse("resolvent needs a spectral point (--z or [command].z)")
    model, family = cfg.build()
    _emit(format_matrix(krein_resolvent(model, family, p.z).r), out)
    return EXIT_PASS


def cmd_demo(out: str | None) -> int:
    lines = []
    ok = True

    model, family = pinned_two_level()
    r0 = krein_resolvent(model, family, 0.0).r
    rows = compare_spectrum(model, family, (-10.0, 1.0 - 1e-3))
    pinned_err = abs(rows[0].via_q_root - 0.5) if len(rows) == 1 else float("inf")
    ok &= pinned_err <= 1e-10
    lines.append("pinned two-level model: A0 = diag(1, 2), tau = [1, 0], alpha = 1/2")
    lines.append(f"  R^Q_0 diagonal       {fmt(r0[0, 0].real)} {fmt(r0[1, 1].real)}")
    lines.append(f"  bound state via Q    {fmt(rows[0].via_q_root) if rows else 'none'} (exact 0.5, error {pinned_err:.2e})")

    model, family = lattice_delta(32, alpha=1.0)
    rows = compare_spectrum(model, family, (-3.0, -1e-3))
    err = spectrum_discrepancy(rows)
    ok &= len(rows) == 1 and err <= 1e-8
    lines.append("lattice delta model: 32 sites, Dirichlet, alpha = 1 at site 16")
    if rows:
        lines.append(f"  bound state via Q    {fmt(rows[0].via_q_root)}")
        lines.append(f"  bound state via eig  {fmt(rows[0].via_diagonalization)} (discrepancy {err:.2e})")
    report = identity_suite(model, family).merged(verify_main_theorem(model, family))
    ok &= report.passed
    lines.append(f"  identity suite + main theorem: {'pass' if report.passed else 'FAIL'} "
                 f"({len(report.entries)} checks)")
    _emit("\n".join(lines) + "\n", out)
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kreinq", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *extra):
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, help="sampling seed, overrides [command].seed")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance (repeatable)")
        for flag, help_ in extra:
            p.add_argument(flag, help=help_)
        return p

    common(sub.add_parser("verify", help="identity suite and main-theorem checks"),
           ("--interval", "a,b: also cross-check the spectrum on this interval"))
    common(sub.add_parser("scan", help="classify a grid of spectral points"),
           ("--grid", "re0,re1,im0,im1,nx,ny"))
    common(sub.add_parser("spectrum", help="eigenvalues of A_Q via Q roots and via diagonalization"),
           ("--interval", "a,b"))
    common(sub.add_parser("resolvent", help="write the Krein resolvent at z"), ("--z", "re,im"))
    demo = sub.add_parser("demo", help="pinned two-level and lattice showcases")
    demo.add_argument("--out")
    return parser


VALUE_FLAGS = ("--grid", "--interval", "--z")


def _glue_values(argv: list[str]) -> list[str]:
    """'--grid -5,5,...' -> '--grid=-5,5,...' so argparse does not read the value as an option."""
    out: list[str] = []
    it = iter(argv)
    for item in it:
        if item in VALUE_FLAGS:
            value = next(it, None)
            out.append(item if value is None else f"{item}={value}")
        else:
            out.append(item)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    try:
        if args.command == "demo":
            return cmd_demo(args.out)
        cfg = _load(args)
        handler = {"verify": cmd_verify, "scan": cmd_scan, "spectrum": cmd_spectrum,
                   "resolvent": cmd_resolvent}[args.command]
        return handler(cfg, args.out)
    except KreinError as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
