"""Command-line entry point: ``dsicheck <subcommand> ...``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import conventions, hbar_series, spectrum
from .catalog import ModelId, list_catalog, reference_model
from .eigensolver import GridSettings, solve_levels
from .errors import ConfigError, DSICheckError, ReportIOError, TableMismatch
from .report import CHECKS, DEFAULT_TOLERANCES, FORMATS, SuiteConfig, emit_report, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _models(args) -> list[ModelId]:
    if getattr(args, "all", False) or not args.model:
        return list(ModelId)
    return [ModelId.parse(m) for m in args.model]


def _tolerances(pairs: Sequence[str]) -> dict[str, float]:
    out = dict(DEFAULT_TOLERANCES)
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects name=value, got {pair!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name}: {value!r} is not a number") from None
    return out


def _grid(args) -> GridSettings:
    return GridSettings(n_points=args.grid) if args.grid else GridSettings()


def _write(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write {out}: {exc}") from None


def _metadata(started: float) -> dict:
    from importlib import metadata

    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {"version": version, "finished": time.strftime("%Y-%m-%dT%H:%M:%S"), "runtime_s": round(time.time() - started, 3)}


# -- subcommands --------------------------------------------------------------


def cmd_catalog(args) -> int:
    rows = []
    for mid, raw in list_catalog():
        spec = reference_model(mid)
        rows.append(
            {
                "model": mid.value,
                "params": raw.as_dict(),
                "domain": [spec.domain.x1, spec.domain.x2],
                "a": spec.a,
                "b": spec.b,
                "hbar_explicit": spec.hbar_explicit,
            }
        )
    if args.format == "json":
        _write(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        lines = [f"{r['model']:<10} {r['params']}  domain=({r['domain'][0]:g}, {r['domain'][1]:g})" for r in rows]
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_PASS


def _suite_config(args, checks: list[str]) -> SuiteConfig:
    return SuiteConfig(
        models=_models(args),
        checks=checks,
        hbar=list(args.hbar) if args.hbar else [None],
        n_max=args.n_max,
        grid=_grid(args),
        tolerances=_tolerances(args.tol),
        out=args.out,
        format=args.format,
    )


def cmd_verify(args) -> int:
    started = time.time()
    checks = [c.strip() for c in args.checks.split(",")] if args.checks else None
    cfg = _suite_config(args, checks or SuiteConfig().checks)
    reports = run_suite(cfg)
    return emit_report(reports, cfg.format, cfg.out, _metadata(started) if cfg.out else None)


def cmd_report(args) -> int:
    started = time.time()
    cfg = SuiteConfig.from_toml(args.config)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    if args.format is not None:
        cfg = replace(cfg, format=args.format)
    reports = run_suite(cfg)
    return emit_report(reports, cfg.format, cfg.out, _metadata(started) if cfg.out else None)


def cmd_spectrum(args) -> int:
    results = []
    for mid in _models(args):
        for h in args.hbar or [None]:
            results.append(spectrum.spectrum(reference_model(mid, h), args.n_max))
    if args.format == "json":
        _write(json.dumps([r.to_dict() for r in results], indent=2) + "\n", args.out)
    elif args.format == "csv":
        _write("".join(f"# {r.model.value}\n{r.to_csv()}" for r in results) if len(results) > 1 else results[0].to_csv(), args.out)
    else:
        lines = []
        for r in results:
            lines.append(f"{r.model.value}: E0 = {r.e0:.10g}")
            lines += [f"  n={n}  E-={em:.10g}  E={ea:.10g}" for n, em, ea in r.levels]
            lines += [f"  TableMismatch n={t.n}: tabulated {t.closed_form:.10g}, g-difference {t.g_difference:.10g}" for t in r.table_mismatches]
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_FAIL if any(r.table_mismatches for r in results) and args.strict else EXIT_PASS


def cmd_eigen(args) -> int:
    tol = _tolerances(args.tol)["eigen"]
    rows, ok = [], True
    for mid in _models(args):
        for h in args.hbar or [None]:
            spec = reference_model(mid, h)
            sol = solve_levels(spec, args.n_max, _grid(args))
            for n, ev in enumerate(sol.eigenvalues):
                exact = spectrum.energy_level(spec, n, strict=False)
                err = float(abs(ev - exact) / (1.0 + abs(exact)))
                ok = ok and err <= tol
                rows.append((spec.label(), spec.hbar, n, float(ev), exact, err))
            if args.dat:
                args.dat.mkdir(parents=True, exist_ok=True)
                for k in range(len(sol.eigenvalues)):
                    sol.save(k, args.dat / f"{spec.label()}_hbar{spec.hbar:g}_n{k}.dat", coordinate="x")
    if args.format == "json":
        keys = ("model", "hbar", "n", "eigenvalue", "analytic", "rel_error")
        _write(json.dumps([dict(zip(keys, r)) for r in rows], indent=2) + "\n", args.out)
    elif args.format == "csv":
        text = "model,hbar,n,eigenvalue,analytic,rel_error\n" + "".join(
            f"{m},{h!r},{n},{ev!r},{ex!r},{err!r}\n" for m, h, n, ev, ex, err in rows
        )
        _write(text, args.out)
    else:
        _write("".join(f"{m:<10} hbar={h:g} n={n}  {ev:.10f}  analytic {ex:.10f}  rel err {err:.1e}\n" for m, h, n, ev, ex, err in rows), args.out)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_series(args) -> int:
    spec = reference_model(ModelId.DRHO_EXT1, args.hbar[0] if args.hbar else None)
    rows = hbar_series.convergence_table(args.x, spec, args.n_max)
    if args.format == "json":
        _write(json.dumps([{"N": N, "error": e} for N, e in rows], indent=2) + "\n", args.out)
    elif args.format == "csv":
        _write(hbar_series.convergence_csv(rows), args.out)
    else:
        ratio = float(hbar_series.convergence_ratio(args.x, spec))
        lines = [f"x = {args.x:g}, (hbar/D)^2 = {ratio:.6g}"] + [f"N={N:>3}  {e:.6e}" for N, e in rows]
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_PASS if rows[-1][1] < 1e-10 or args.n_max < 20 else EXIT_FAIL


def cmd_conventions(args) -> int:
    rows, ok = [], True
    for mid in _models(args):
        if mid is ModelId.DRHO_EXT1:
            continue
        for h in args.hbar or [None]:
            spec = reference_model(mid, h)
            pot = conventions.check_potential_relation(spec)
            trip = conventions.round_trip_error(spec)
            ok = ok and pot < DEFAULT_TOLERANCES["potential_relation"] and trip < DEFAULT_TOLERANCES["round_trip"]
            rows.append(
                {
                    "model": mid.value,
                    "hbar": spec.hbar,
                    "barred": conventions.to_barred(spec).values,
                    "potential_residual": pot,
                    "round_trip_error": trip,
                    "energy_residual": conventions.energy_relation(spec),
                }
            )
    if args.format == "json":
        _write(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        _write(
            "".join(
                f"{r['model']:<5} hbar={r['hbar']:g} barred={r['barred']} V-residual={r['potential_residual']:.1e} "
                f"round-trip={r['round_trip_error']:.1e}\n"
                for r in rows
            ),
            args.out,
        )
    return EXIT_PASS if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, formats=FORMATS, n_max: int = 4) -> None:
    p.add_argument("--model", action="append", help="model id (repeatable); default all")
    p.add_argument("--all", action="store_true", help="every catalog model")
    p.add_argument("--hbar", action="append", type=float, help="hbar value (repeatable)")
    p.add_argument("--n-max", type=int, default=n_max, dest="n_max")
    p.add_argument("--grid", type=int, default=None, help="eigensolver intervals on the coarsest grid")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a tolerance")
    p.add_argument("--out", type=Path, default=None, help="output file (stdout when omitted)")
    p.add_argument("--format", choices=formats, default=formats[-1] if "text" in formats else formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsicheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list models and reference parameters")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", help="run verification checks")
    _common(p)
    p.add_argument("--checks", default=None, help=f"comma list from {', '.join(CHECKS)}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="analytic energy levels")
    _common(p)
    p.add_argument("--strict", action="store_true", help="exit 1 when a tabulated closed form disagrees")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eigen", help="finite-difference eigenvalues against the analytic levels")
    _common(p)
    p.add_argument("--dat", type=Path, default=None, help="directory for two-column eigenvector files")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("series", help="hbar-series convergence for DRHO_EXT1")
    _common(p, n_max=20)
    p.add_argument("--x", type=float, default=1.0)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("conventions", help="barred parameter maps and potential relations")
    _common(p)
    p.set_defaults(func=cmd_conventions)

    p = sub.add_parser("report", help="run the suite described by a TOML config")
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--format", choices=FORMATS, default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ReportIOError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TableMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DSICheckError as exc:
        # invalid models or parameters given on the command line
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
