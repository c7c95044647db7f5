"""Deformed ladder operators, partner potentials and grid functions.

Pointwise quantities (f, W, V∓) are evaluated with exact x-derivatives
through :mod:`dsicheck.autodiff`.  Grid operators act on
:class:`GridFunction` samples with fourth-order finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .autodiff import Jet, value_of
from .catalog import ModelSpec
from .errors import GridTooCoarse, NotFlat, OutOfDomain, PoleEncountered
from .families import Interval

Sign = Union[str, int]

# window used in place of an infinite endpoint when sampling pointwise identities
INFINITE_WINDOW = 8.0


def _check_inside(spec: ModelSpec, x) -> None:
    xv = np.asarray(value_of(x), dtype=float)
    if not spec.domain.contains(xv):
        raise OutOfDomain(f"{spec.label()}: x outside ({spec.domain.x1}, {spec.domain.x2})")


def _a_or_default(spec: ModelSpec, a):
    return spec.derived.a if a is None else a


def eval_f(spec: ModelSpec, x):
    _check_inside(spec, x)
    return spec.family.f(x, spec.raw)


def eval_W(spec: ModelSpec, x, a=None):
    """Superpotential W(x, a); ``a`` defaults to the spec's own value."""
    _check_inside(spec, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = spec.family.W(x, _a_or_default(spec, a), spec)
    if not np.all(np.isfinite(value_of(w))):
        raise PoleEncountered(f"{spec.label()}: superpotential is singular at the requested point")
    return w


def eval_V(spec: ModelSpec, x):
    """The potential as tabulated, i.e. V_minus shifted by the ground energy."""
    _check_inside(spec, x)
    return spec.family.V(x, spec.raw)


def W_and_slope(spec: ModelSpec, x, a=None) -> tuple[np.ndarray, np.ndarray]:
    """W and its exact x-derivative at plain (non-jet) points."""
    jet = eval_W(spec, Jet.seed_x(np.asarray(x, dtype=float), px=1), a)
    return jet.d(0, 0), jet.d(1, 0)


def _partner_potential(spec: ModelSpec, x, sign: int, a=None):
    x = np.asarray(value_of(x), dtype=float)
    w, dw = W_and_slope(spec, x, a)
    f = spec.family.f(x, spec.raw)
    return w * w + sign * spec.hbar * f * dw


def eval_V_minus(spec: ModelSpec, x, a=None):
    return _partner_potential(spec, x, -1, a)


def eval_V_plus(spec: ModelSpec, x, a=None):
    return _partner_potential(spec, x, +1, a)


def interior_points(spec: ModelSpec, n: int, margin: float = 0.02) -> np.ndarray:
    """Deterministic interior mesh that skips ``margin`` of the range at each end.

    Infinite endpoints are replaced by a finite window of width
    ``INFINITE_WINDOW`` before the margin is applied.
    """
    x1, x2 = spec.domain.x1, spec.domain.x2
    if math.isinf(x1) and math.isinf(x2):
        x1, x2 = -INFINITE_WINDOW / 2, INFINITE_WINDOW
    elif math.isinf(x2):
        x2 = x1 + INFINITE_WINDOW
    elif math.isinf(x1):
        x1 = x2 - INFINITE_WINDOW
    span = x2 - x1
    return np.linspace(x1 + margin * span, x2 - margin * span, n)


def ground_energy_shift(spec: ModelSpec, n_samples: int = 100, rtol: float = 1e-9) -> float:
    """E0 = V - V_minus, after checking that the difference is constant."""
    xs = interior_points(spec, n_samples)
    diff = eval_V(spec, xs) - eval_V_minus(spec, xs)
    e0 = float(diff[len(diff) // 2])
    spread = float(np.max(np.abs(diff - e0)))
    if not spread < rtol * (1 + abs(e0)):
        raise NotFlat(f"{spec.label()}: V - V_minus varies by {spread:.3e} (E0 ~ {e0:.6g})")
    return e0


# -- grid functions -----------------------------------------------------------


@dataclass(frozen=True)
class GridFunction:
    """Real samples on the uniform grid ``linspace(interval.x1, interval.x2, n)``.

    ``edge`` counts the samples at each end that came from one-sided
    stencils and should be treated as low accuracy.

    With ``coordinate="u"`` the grid is uniform in the canonical variable
    u = ∫ dx / f and the samples hold φ = sqrt(f) ψ, so that the L² inner
    product is the plain one in u.  This representation suits models whose
    states have algebraic tails in x.
    """

    interval: Interval
    values: np.ndarray
    edge: int = 0
    coordinate: str = "x"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.coordinate not in ("x", "u"):
            raise ValueError("coordinate must be 'x' or 'u'")
        if values.ndim != 1:
            raise ValueError("grid function values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")

    @classmethod
    def sample(cls, interval: Interval, n_points: int, func) -> "GridFunction":
        x = np.linspace(interval.x1, interval.x2, n_points)
        return cls(interval, func(x))

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.interval.x1, self.interval.x2, self.n_points)

    @property
    def h(self) -> float:
        return self.interval.length / (self.n_points - 1)

    def with_values(self, values: np.ndarray, edge: Optional[int] = None) -> "GridFunction":
        return replace(self, values=values, edge=self.edge if edge is None else edge)

    def interior(self, extra: int = 0) -> slice:
        k = self.edge + extra
        return slice(k, self.n_points - k)

    def norm(self) -> float:
        return math.sqrt(integrate(self.values**2, self.h))

    def normalized(self) -> "GridFunction":
        return self.with_values(self.values / self.norm())

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def to_text(self) -> str:
        return "".join(f"{x:.16e} {v:.16e}\n" for x, v in zip(self.x, self.values))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "GridFunction":
        data = np.loadtxt(text.splitlines(), ndmin=2)
        x, v = data[:, 0], data[:, 1]
        return cls(Interval(float(x[0]), float(x[-1])), v)


def integrate(values: np.ndarray, h: float) -> float:
    """Composite Simpson rule on a uniform grid (trapezoid on an odd tail)."""
    from scipy.integrate import simpson

    return float(simpson(values, dx=h))


def inner(psi: GridFunction, phi: GridFunction, window: slice = slice(None)) -> float:
    same = psi.coordinate == phi.coordinate and psi.n_points == phi.n_points
    if not same or not np.allclose(psi.x[[0, -1]], phi.x[[0, -1]]):
        raise ValueError("grid functions live on different grids")
    return integrate(psi.values[window] * phi.values[window], psi.h)


def derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative; one-sided fourth-order stencils at the ends."""
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 16:
        raise GridTooCoarse(f"need at least 16 grid points, got {n}")
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    out[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    out[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    out[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    out[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    return out


def _parse_sign(sign: Sign) -> int:
    if sign in ("+", 1, "plus"):
        return 1
    if sign in ("-", "−", -1, "minus"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def apply_ladder(spec: ModelSpec, sign: Sign, psi: GridFunction) -> GridFunction:
    """A± psi = ∓ħ sqrt(f) d/dx (sqrt(f) psi) + W psi.

    On a u-grid the same operator reads (∓ħ d/du + W) φ.
    """
    s = _parse_sign(sign)
    if psi.n_points < 16:
        raise GridTooCoarse(f"need at least 16 grid points, got {psi.n_points}")
    if psi.coordinate == "u":
        x = spec.family.from_u(psi.x, spec.raw)
        _check_inside(spec, x)
        w = value_of(eval_W(spec, x))
        out = -s * spec.hbar * derivative(psi.values, psi.h) + w * psi.values
        return psi.with_values(out, edge=psi.edge + 2)
    x = psi.x
    _check_inside(spec, x)
    root_f = np.sqrt(spec.family.f(x, spec.raw))
    w = value_of(eval_W(spec, x))
    kinetic = root_f * derivative(root_f * psi.values, psi.h)
    return psi.with_values(-s * spec.hbar * kinetic + w * psi.values, edge=psi.edge + 2)


def apply_hamiltonian(spec: ModelSpec, which: Sign, psi: GridFunction) -> GridFunction:
    """H_- = A+ A- and H_+ = A- A+, applied factor by factor."""
    s = _parse_sign(which)
    first, second = ("-", "+") if s < 0 else ("+", "-")
    return apply_ladder(spec, second, apply_ladder(spec, first, psi))


def apply_hamiltonian_direct(spec: ModelSpec, which: Sign, psi: GridFunction) -> GridFunction:
    """-ħ² sqrt(f) d/dx f d/dx sqrt(f) ψ + V∓ ψ, built from the potentials.

    Independent of the ladder factors, so comparing the two forms tests
    the potential formulas rather than the grid algebra.
    """
    s = _parse_sign(which)
    if psi.n_points < 16:
        raise GridTooCoarse(f"need at least 16 grid points, got {psi.n_points}")
    potential = eval_V_plus if s > 0 else eval_V_minus
    h2 = spec.hbar**2
    if psi.coordinate == "u":
        x = spec.family.from_u(psi.x, spec.raw)
        _check_inside(spec, x)
        d2 = derivative(derivative(psi.values, psi.h), psi.h)
        out = -h2 * d2 + value_of(potential(spec, x)) * psi.values
        return psi.with_values(out, edge=psi.edge + 4)
    x = psi.x
    _check_inside(spec, x)
    f = spec.family.f(x, spec.raw)
    root_f = np.sqrt(f)
    inner_d = f * derivative(root_f * psi.values, psi.h)
    out = -h2 * root_f * derivative(inner_d, psi.h) + value_of(potential(spec, x)) * psi.values
    return psi.with_values(out, edge=psi.edge + 4)
