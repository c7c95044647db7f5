"""Verification suites: configuration, execution and report emission."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Optional, Union

import numpy as np

from . import conventions, dsi, hbar_series, spectrum
from .catalog import REFERENCE_PARAMS, ModelId, ModelSpec, build_model, partner_shift, rescale_hbar
from .eigensolver import GridSettings, solve_levels
from .errors import ConfigError, DSICheckError, ReportIOError
from .operators import apply_ladder, integrate, interior_points
from .wavefunctions import (
    boundary_check,
    eigenstate_on,
    intertwining_residual,
    ladder_state,
    overlap,
    require_admissible,
    state_grid,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CHECKS = ("dsi", "conditions", "series", "spectrum", "table", "eigen", "wavefunction", "conventions")
# the tabulated closed forms are cross-checked on request only: two entries
# are known to disagree with the g-difference form
DEFAULT_CHECKS = tuple(c for c in CHECKS if c != "table")

DEFAULT_TOLERANCES: dict[str, float] = {
    "dsi": 1e-11,
    "condition1": 1e-12,
    "condition2": 1e-13,
    "order_n": 1e-10,
    "pair_sum": 1e-13,
    "series_ratio": 0.2,
    "resummation": 1e-10,
    "flatness": 1e-9,
    "table": spectrum.TABLE_RTOL,
    "eigen": 1e-6,
    "annihilation": 1e-8,
    "ladder_overlap": 1e-6,
    "isospectrality": 1e-5,
    "orthogonality": 1e-6,
    "boundary": 1e-6,
    "intertwining": 1e-6,
    "round_trip": 1e-14,
    "potential_relation": 1e-12,
    "energy_relation": 1e-12,
}

CSV_HEADER = ("suite", "model", "check", "max_residual", "tolerance", "pass")


@dataclass(frozen=True)
class CheckReport:
    suite: str
    model: str
    check: str
    max_residual: Optional[float]  # None when the check raised
    tolerance: float
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.max_residual is not None and math.isfinite(self.max_residual) and self.max_residual <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "model": self.model,
            "check": self.check,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "details": self.details,
        }


@dataclass
class SuiteConfig:
    models: list[ModelId] = field(default_factory=lambda: list(ModelId))
    checks: list[str] = field(default_factory=lambda: list(DEFAULT_CHECKS))
    hbar: list[Optional[float]] = field(default_factory=lambda: [None])  # None: reference ħ
    overrides: dict[ModelId, dict[str, Any]] = field(default_factory=dict)
    n_max: int = 4
    grid: GridSettings = field(default_factory=GridSettings)
    state_points: int = 8001
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: Optional[Path] = None
    format: str = "json"

    def __post_init__(self) -> None:
        try:
            self.models = [ModelId.parse(m) for m in self.models]
        except DSICheckError as exc:
            raise ConfigError(str(exc)) from None
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(unknown)} (choose from {', '.join(CHECKS)})")
        for name, tol in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}")
            if not (isinstance(tol, (int, float)) and tol > 0):
                raise ConfigError(f"tolerance {name!r} must be positive, got {tol!r}")
        if self.n_max < 1:
            raise ConfigError("n_max must be at least 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        for h in self.hbar:
            if h is not None and not h > 0:
                raise ConfigError(f"hbar values must be positive, got {h!r}")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SuiteConfig":
        data = dict(data)
        kwargs: dict[str, Any] = {}
        try:
            models = data.pop("models", "all")
            if models != "all":
                kwargs["models"] = [ModelId.parse(m) for m in _as_list(models)]
            if "checks" in data:
                checks = data.pop("checks")
                kwargs["checks"] = list(DEFAULT_CHECKS) if checks == "all" else [str(c) for c in _as_list(checks)]
            if "hbar" in data:
                kwargs["hbar"] = [float(h) for h in _as_list(data.pop("hbar"))]
            if "overrides" in data:
                kwargs["overrides"] = {ModelId.parse(k): dict(v) for k, v in data.pop("overrides").items()}
            if "n_max" in data:
                kwargs["n_max"] = int(data.pop("n_max"))
            if "grid" in data:
                grid = dict(data.pop("grid"))
                if "state_points" in grid:
                    kwargs["state_points"] = int(grid.pop("state_points"))
                kwargs["grid"] = GridSettings(**grid)
            if "tolerances" in data:
                kwargs["tolerances"] = {**DEFAULT_TOLERANCES, **data.pop("tolerances")}
            output = dict(data.pop("output", {}))
            if "path" in output:
                kwargs["out"] = Path(output.pop("path"))
            if "format" in output:
                kwargs["format"] = str(output.pop("format"))
            if output:
                raise ConfigError(f"unknown output keys: {', '.join(sorted(output))}")
        except DSICheckError as exc:
            raise ConfigError(str(exc)) from None
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        if data:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(data))}")
        return cls(**kwargs)

    @classmethod
    def from_toml(cls, path: Union[str, Path]) -> "SuiteConfig":
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return cls.from_mapping(data)


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def model_for(mid: ModelId, hbar: Optional[float], overrides: Mapping[str, Any]) -> ModelSpec:
    raw = REFERENCE_PARAMS[mid]
    if overrides:
        raw = raw.replace(**overrides)
    if hbar is not None:
        raw = rescale_hbar(mid, raw, hbar)
    return build_model(mid, raw)


# -- individual checks ----------------------------------------------------

Emit = Callable[[str, Optional[float], str], None]


def _check_dsi(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    emit("dsi", dsi.dsi_residual(spec).max_relative, "relative to the largest term, 200 points")


def _check_conditions(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    if spec.hbar_explicit:
        return
    emit("condition1", dsi.condition1_residual(spec).max_relative, "relative to the largest term")
    emit("condition2", dsi.condition2_residual(spec).max_relative, "mixed partial over derivative scale")


def _check_series(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    if spec.id is not ModelId.DRHO_EXT1:
        return
    xs = interior_points(spec, 50)
    emit("order_n", max(hbar_series.order_n_residual(n, xs, None, spec) for n in range(1, 9)), "n = 1..8")
    worst = max(hbar_series.pair_sum_residual(s, xs, None, spec) for s in range(2, 9))
    emit("pair_sum", worst, "s = 2..8, relative to the largest summand")
    x0 = 1.0
    rows = hbar_series.convergence_table(x0, spec, 20)
    errs = np.array([e for _, e in rows])
    ratios = errs[1:5] / errs[:4]
    expected = float(hbar_series.convergence_ratio(x0, spec))
    emit("series_ratio", float(np.max(np.abs(ratios / expected - 1))), f"(hbar/D)^2 = {expected:.6g} at x = {x0}")
    emit("resummation", float(errs[-1]), f"N = 20 partial sum against the closed form, tail ratio {expected:.3g}")


def _check_spectrum(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    from .operators import ground_energy_shift, eval_V, eval_V_minus

    e0 = ground_energy_shift(spec)
    xs = interior_points(spec, 100)
    diff = np.asarray(eval_V(spec, xs)) - np.asarray(eval_V_minus(spec, xs))
    emit("flatness", float(np.max(np.abs(diff - e0)) / (1 + abs(e0))), f"E0 = {e0!r}")


def _check_table(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    rows = spectrum.table_crosscheck(spec, 5)
    worst, bad = 0.0, []
    for r in rows[1:]:
        rel = abs(r.g_difference - r.closed_form) / max(abs(r.g_difference), abs(r.closed_form), 1e-300)
        worst = max(worst, rel)
        if not r.agrees:
            bad.append(r.n)
    detail = f"TableMismatch at n = {bad}" if bad else "n = 1..5"
    emit("table", worst, detail)


def _check_eigen(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    require_admissible(spec, cfg.n_max)
    sol = solve_levels(spec, cfg.n_max, cfg.grid)
    exact = np.array([spectrum.energy_level(spec, n, strict=False) for n in range(cfg.n_max + 1)])
    err = np.abs(sol.eigenvalues - exact) / (1.0 + np.abs(exact))
    emit("eigen", float(np.max(err)), f"n = 0..{cfg.n_max}, relative to 1 + |E|")


def _check_wavefunction(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    levels = min(3, cfg.n_max)
    require_admissible(spec, levels + 1)
    grid = state_grid(spec, levels + 1, cfg.state_points)
    window = grid.inner_window()
    states = [ladder_state(spec, n, grid) for n in range(levels + 1)]

    killed = apply_ladder(spec, "-", states[0])
    emit("annihilation", float(np.max(np.abs(killed.values[window]))) / states[0].sup(), "sup |A-psi0| / sup |psi0|")

    sol = solve_levels(spec, levels, cfg.grid)
    worst = max(1 - overlap(states[n], eigenstate_on(grid, sol, n), window) for n in range(levels + 1))
    emit("ladder_overlap", worst, f"1 - overlap, n = 0..{levels}")

    partner = partner_shift(spec)
    iso = 0.0
    for n in range(levels):
        lowered = apply_ladder(spec, "-", ladder_state(spec, n + 1, grid))
        iso = max(iso, 1 - overlap(lowered, ladder_state(partner, n, grid), window))
    emit("isospectrality", iso, f"1 - overlap, n = 0..{levels - 1}")

    orth = max(
        abs(integrate(states[i].values * states[j].values, grid.nodes[1] - grid.nodes[0]))
        for i in range(len(states))
        for j in range(i)
    )
    emit("orthogonality", orth, "max |<psi_m, psi_n>|")

    limit, failures = 0.0, []
    for n, psi in enumerate(states):
        for rep in boundary_check(spec, psi):
            limit = max(limit, rep.limit_estimate)
            if not (rep.square_integrable and rep.hermiticity_ok):
                failures.append(f"n={n}@{rep.endpoint}")
    emit("boundary", math.inf if failures else limit, "failing: " + ", ".join(failures) if failures else "all states, both ends")

    res, scale = intertwining_residual(spec)
    emit("intertwining", res / scale, f"scale = {scale:.6g}")


def _check_conventions(spec: ModelSpec, cfg: SuiteConfig, emit: Emit) -> None:
    if spec.id is ModelId.DRHO_EXT1:
        return
    emit("round_trip", conventions.round_trip_error(spec), "from_barred(to_barred(p))")
    emit("potential_relation", conventions.check_potential_relation(spec), "|V - s Vbar| / (1 + |V|), 50 points")
    emit("energy_relation", conventions.energy_relation(spec, 3), "n = 1..3")


# tolerance keys each check can emit; used to label a failure before any emit
_PRIMARY_KEY = {
    "dsi": "dsi",
    "conditions": "condition1",
    "series": "order_n",
    "spectrum": "flatness",
    "table": "table",
    "eigen": "eigen",
    "wavefunction": "annihilation",
    "conventions": "round_trip",
}

_RUNNERS = {
    "dsi": _check_dsi,
    "conditions": _check_conditions,
    "series": _check_series,
    "spectrum": _check_spectrum,
    "table": _check_table,
    "eigen": _check_eigen,
    "wavefunction": _check_wavefunction,
    "conventions": _check_conventions,
}


def _suite_label(spec_hbar: float) -> str:
    return f"hbar={spec_hbar:g}"


def run_suite(config: SuiteConfig, runners: Optional[Mapping[str, Callable]] = None) -> list[CheckReport]:
    """Run every selected check for every model and ħ; errors become failed reports.

    ``runners`` replaces individual checks by name (used to inject faults).
    """
    table = {**_RUNNERS, **(runners or {})}
    reports: list[CheckReport] = []
    for mid in config.models:
        for h in config.hbar:
            suite = _suite_label(h if h is not None else REFERENCE_PARAMS[mid].hbar)
            try:
                spec = model_for(mid, h, config.overrides.get(mid, {}))
            except DSICheckError as exc:
                reports.append(CheckReport(suite, mid.value, "build", None, 0.0, _describe(exc)))
                continue
            for check in config.checks:

                def emit(name: str, value: Optional[float], details: str = "") -> None:
                    value = None if value is None else float(value)
                    reports.append(CheckReport(suite, mid.value, name, value, config.tolerances[name], details))

                try:
                    table[check](spec, config, emit)
                except DSICheckError as exc:
                    key = _PRIMARY_KEY.get(check, check)
                    reports.append(CheckReport(suite, mid.value, key, None, config.tolerances.get(key, 0.0), _describe(exc)))
    return sorted(reports, key=lambda r: (r.model, r.check, r.suite))


def _describe(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


# -- emission ---------------------------------------------------------------

FORMATS = ("json", "csv", "text")


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


def render(reports: Iterable[CheckReport], fmt: str = "json") -> str:
    reports = list(reports)
    if fmt == "json":
        return json.dumps([r.to_dict() for r in reports], indent=2, allow_nan=False, default=_json_default) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerow([r.suite, r.model, r.check, _fmt(r.max_residual), repr(r.tolerance), str(r.passed).lower()])
        return buf.getvalue()
    if fmt == "text":
        lines = []
        for r in reports:
            mark = "PASS" if r.passed else "FAIL"
            value = "error" if r.max_residual is None else f"{r.max_residual:.3e}"
            lines.append(f"{mark}  {r.model:<10} {r.check:<19} {r.suite:<10} {value:>10} <= {r.tolerance:.1e}  {r.details}")
        n_pass = sum(r.passed for r in reports)
        lines.append(f"{n_pass}/{len(reports)} checks passed")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"format must be one of {', '.join(FORMATS)}")


def _json_default(obj):
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _sanitize(reports: list[CheckReport]) -> list[CheckReport]:
    # JSON has no infinity; an infinite residual is reported as null
    return [replace(r, max_residual=None) if r.max_residual is not None and not math.isfinite(r.max_residual) else r for r in reports]


def emit_report(
    reports: Iterable[CheckReport], fmt: str = "json", path: Optional[Union[str, Path]] = None, metadata: Optional[dict] = None
) -> int:
    """Render ``reports``, write them to ``path`` (stdout when None) and return the exit code.

    Run metadata such as timestamps goes to a ``.meta.json`` sidecar so the
    report itself stays byte-identical between runs.
    """
    reports = _sanitize(list(reports))
    if not reports:
        raise ConfigError("no reports to emit")
    text = render(reports, fmt)
    if path is None:
        sys.stdout.write(text)
    else:
        path = Path(path)
        try:
            path.write_text(text)
            if metadata is not None:
                path.with_name(path.name + ".meta.json").write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise ReportIOError(f"cannot write {path}: {exc}") from None
    return exit_code(reports)


def exit_code(reports: Iterable[CheckReport]) -> int:
    return 0 if all(r.passed for r in reports) else 1
