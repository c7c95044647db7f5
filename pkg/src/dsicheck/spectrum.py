"""Analytic spectra: E_n^(-) = g(a + nħ) - g(a) and absolute energies."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from .catalog import ModelId, ModelSpec
from .errors import LevelOutOfRange, TableMismatch
from .operators import ground_energy_shift

TABLE_RTOL = 1e-10


def g_of_a(spec: ModelSpec, a):
    """Shift function g evaluated at ``a`` (b and ħ taken from ``spec``)."""
    return spec.family.g(a, spec)


def g_difference(spec: ModelSpec, n: int) -> float:
    a, h = spec.derived.a, spec.hbar
    return float(g_of_a(spec, a + n * h) - g_of_a(spec, a))


def _check_range(spec: ModelSpec, n: int) -> None:
    if n < 0:
        raise LevelOutOfRange(f"level index must be nonnegative, got {n}")
    prev = 0.0
    for k in range(1, n + 1):
        cur = g_difference(spec, k)
        if not cur > prev:
            raise LevelOutOfRange(
                f"{spec.label()}: levels stop increasing at n={k} ({cur:.6g} <= {prev:.6g})"
            )
        prev = cur


def table_agrees(g_diff: float, closed: float, rtol: float = TABLE_RTOL) -> bool:
    return abs(g_diff - closed) <= rtol * max(abs(g_diff), abs(closed), 1e-300)


def energy_level(spec: ModelSpec, n: int, strict: bool = True) -> float:
    """E_n^(-) from the g-difference form.

    For unshifted specs the tabulated closed form is compared as well; a
    disagreement raises :class:`TableMismatch` (carrying the g-difference
    value) unless ``strict`` is false.
    """
    _check_range(spec, n)
    value = g_difference(spec, n)
    if strict and spec.shifts == 0 and n > 0:
        closed = float(spec.family.closed_energy(n, spec.raw))
        if not table_agrees(value, closed):
            raise TableMismatch(
                f"{spec.id}: tabulated closed form gives {closed!r}, g-difference gives {value!r} at n={n}",
                model=spec.id.value,
                n=n,
                g_difference=value,
                closed_form=closed,
            )
    return value


def absolute_energy(spec: ModelSpec, n: int) -> float:
    return energy_level(spec, n, strict=False) + ground_energy_shift(spec)


@dataclass(frozen=True)
class TableComparison:
    model: str
    n: int
    g_difference: float
    closed_form: float
    agrees: bool


def table_crosscheck(spec: ModelSpec, n_max: int = 5) -> list[TableComparison]:
    out = []
    for n in range(n_max + 1):
        gd = g_difference(spec, n)
        closed = float(spec.family.closed_energy(n, spec.raw))
        out.append(TableComparison(spec.id.value, n, gd, closed, table_agrees(gd, closed) or n == 0))
    return out


@dataclass
class SpectrumResult:
    model: ModelId
    e0: float
    levels: list[tuple[int, float, float]]  # (n, E_n^(-), E_n)
    numeric: Optional[list[tuple[int, float, float]]] = None  # (n, eigenvalue, |error|)
    table_mismatches: list[TableComparison] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "e0": self.e0,
            "levels": [{"n": n, "E_minus": em, "E_abs": ea} for n, em, ea in self.levels],
            "numeric": None
            if self.numeric is None
            else [{"n": n, "eigenvalue": ev, "abs_error": err} for n, ev, err in self.numeric],
            "table_mismatches": [asdict(t) for t in self.table_mismatches],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "E_abs", "E_numeric", "error"])
        numeric = {n: (ev, err) for n, ev, err in (self.numeric or [])}
        for n, _, ea in self.levels:
            ev, err = numeric.get(n, ("", ""))
            if ev != "":
                ev = ev + self.e0
            writer.writerow([n, repr(ea), repr(ev) if ev != "" else "", repr(err) if err != "" else ""])
        return buf.getvalue()


def spectrum(spec: ModelSpec, n_max: int) -> SpectrumResult:
    """Levels 0..n_max (stopping early where the levels stop increasing)."""
    e0 = ground_energy_shift(spec)
    levels = []
    for n in range(n_max + 1):
        try:
            em = energy_level(spec, n, strict=False)
        except LevelOutOfRange:
            break
        levels.append((n, em, em + e0))
    mismatches = [t for t in table_crosscheck(spec, n_max) if not t.agrees] if spec.shifts == 0 else []
    return SpectrumResult(spec.id, e0, levels, table_mismatches=mismatches)
