"""Ground states, ladder states and the boundary conditions they must meet."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .autodiff import value_of
from .catalog import ModelSpec, partner_shift
from .errors import NonNormalizable
from .families import Interval
from .operators import GridFunction, apply_hamiltonian_direct, apply_ladder, integrate

DECAY_FLOOR = 1e-12  # truncation level of ψ₀ relative to its peak
EDGE_OFFSET = 1e-4  # gap kept from finite endpoints, relative to the domain length
HERMITICITY_RTOL = 1e-6
TAIL_RTOL = 1e-8
VANISHING_EXPONENT = 0.05
INNER_FRACTION = 0.9
# use the canonical coordinate when the x-window is this much longer than the u-window
STRETCH_LIMIT = 10.0
_GAUSS_ORDER = 8
# H₋ on a ladder state stacks 2n + 2 difference quotients, so roundoff grows
# like h^{-4} already at n = 1; a coarser grid balances it against truncation
EIGEN_CHECK_POINTS = 1001
INTERTWINING_POINTS = 2001


@dataclass(frozen=True)
class StateGrid:
    """Uniform grid in ``coordinate`` (x, or the canonical u) over ``interval``."""

    interval: Interval
    n_points: int = 8001
    coordinate: str = "x"

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.interval.x1, self.interval.x2, self.n_points)

    def physical_x(self, spec: ModelSpec) -> np.ndarray:
        if self.coordinate == "x":
            return self.nodes
        return np.asarray(spec.family.from_u(self.nodes, spec.raw), dtype=float)

    def inner_window(self, fraction: float = INNER_FRACTION) -> slice:
        cut = int(round(0.5 * (1 - fraction) * (self.n_points - 1)))
        return slice(cut, self.n_points - cut)

    def wrap(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.interval, values, coordinate=self.coordinate)


def _shifted(spec: ModelSpec, k: int) -> ModelSpec:
    for _ in range(k):
        spec = partner_shift(spec)
    return spec


def _log_ground(spec: ModelSpec, x: np.ndarray, i_ref: int = 0) -> np.ndarray:
    """log ψ₀ up to a constant: -½ log f - ∫_{x[i_ref]}^{x} W / (ħ f).

    ``x`` must be monotone.  The integral is accumulated interval by
    interval with Gauss-Legendre quadrature; values past an overflow stay
    non-finite.
    """
    t, wts = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    lo, hi = x[:-1], x[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * t[None, :]
    raw = spec.raw
    with np.errstate(all="ignore"):
        w = np.asarray(value_of(spec.family.W(nodes, spec.derived.a, spec)), dtype=float)
        integrand = w / (spec.hbar * spec.family.f(nodes, raw))
        pieces = (integrand * wts[None, :]).sum(axis=1) * half
        cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
        cumulative -= cumulative[i_ref]
        return -0.5 * np.log(spec.family.f(x, raw)) - cumulative


def _reference_point(spec: ModelSpec) -> float:
    d = spec.domain
    if d.finite:
        return 0.5 * (d.x1 + d.x2)
    if math.isfinite(d.x1):
        return d.x1 + 1.0
    if math.isfinite(d.x2):
        return d.x2 - 1.0
    return 0.0


def _decay_edge(spec: ModelSpec, start: float, direction: float) -> float:
    """Point along ``direction`` where ψ₀ falls DECAY_FLOOR below its running peak.

    The outward mesh grows geometrically (to ~1e6) so that power-law
    tails are reached at modest cost.
    """
    steps = 0.01 * 1.01 ** np.arange(1400)
    x = start + direction * np.concatenate([[0.0], np.cumsum(steps)])
    logs = _log_ground(spec, x)
    good = np.isfinite(logs)
    if not good.all():
        stop = int(np.argmin(good))
        x, logs = x[:stop], logs[:stop]
    if logs.size == 0:
        raise NonNormalizable(f"{spec.label()}: ground state is not finite at the reference point")
    below = np.nonzero(logs - np.maximum.accumulate(logs) < math.log(DECAY_FLOOR))[0]
    if below.size == 0:
        raise NonNormalizable(
            f"{spec.label()}: ground state does not decay toward {'+' if direction > 0 else '-'}infinity"
        )
    return float(x[below[0]])


def state_grid(
    spec: ModelSpec, n_max: int = 0, n_points: int = 8001, coordinate: Optional[str] = None
) -> StateGrid:
    """Grid resolving ψ₀ … ψ_{n_max} and the shifted ground states behind them.

    Infinite x-ends are cut where the slowest-decaying ψ₀(·, a_k), k ≤ n_max,
    drops below DECAY_FLOOR; finite ends are approached to within
    EDGE_OFFSET of the domain length (of unit length for half-lines).  Unless ``coordinate`` is forced, the
    canonical u is used when an infinite x-end sits at a finite u, or when
    the x-window is over STRETCH_LIMIT times longer than the u-window.
    """
    dom, fam, raw = spec.domain, spec.family, spec.raw
    ud = fam.u_domain(raw)
    ref = _reference_point(spec)
    shifted = [_shifted(spec, k) for k in range(n_max + 1)]
    # an x-end needs a decay cut unless it is finite, or u is used and the u-end is finite
    compact_u = (math.isinf(dom.x1) and math.isfinite(ud.x1)) or (math.isinf(dom.x2) and math.isfinite(ud.x2))
    if coordinate is None and compact_u:
        coordinate = "u"

    def cut(end: float, direction: float, u_end: float):
        if math.isfinite(end):
            return end
        if coordinate == "u" and math.isfinite(u_end):
            return None
        pick = min if direction < 0 else max
        return pick(_decay_edge(s, ref, direction) for s in shifted)

    lo, hi = cut(dom.x1, -1.0, ud.x1), cut(dom.x2, +1.0, ud.x2)
    with np.errstate(all="ignore"):
        ulo = ud.x1 if math.isfinite(ud.x1) else float(fam.to_u(lo, raw))
        uhi = ud.x2 if math.isfinite(ud.x2) else float(fam.to_u(hi, raw))
    if coordinate is None:
        coordinate = "u" if (hi - lo) > STRETCH_LIMIT * (uhi - ulo) else "x"

    full = ud if coordinate == "u" else dom
    if coordinate == "u":
        lo, hi = ulo, uhi
    # the gap scales with the domain length; half-lines use a unit length
    gap = EDGE_OFFSET * (full.length if full.finite else 1.0)
    if math.isfinite(full.x1):
        lo += gap
    if math.isfinite(full.x2):
        hi -= gap
    return StateGrid(Interval(lo, hi), n_points, coordinate)


def _fix_sign(values: np.ndarray) -> np.ndarray:
    """Positive at the midpoint, or at the largest sample when the midpoint is a node."""
    mid = values[values.size // 2]
    peak = np.max(np.abs(values))
    pivot = mid if abs(mid) > 1e-6 * peak else values[int(np.argmax(np.abs(values)))]
    return -values if pivot < 0 else values


def _normalized(psi: GridFunction, spec: ModelSpec) -> GridFunction:
    norm = psi.norm()
    if not (np.isfinite(norm) and norm > 0):
        raise NonNormalizable(f"{spec.label()}: state has no finite nonzero norm")
    return psi.with_values(psi.values / norm)


def ground_state(spec: ModelSpec, grid: Optional[StateGrid] = None) -> GridFunction:
    """ψ₀ ∝ f^{-1/2} exp(-∫ W / (ħ f)) with unit L² norm (φ₀ = sqrt(f) ψ₀ on u-grids)."""
    grid = grid or state_grid(spec)
    x = grid.physical_x(spec)
    logs = _log_ground(spec, x, x.size // 2)
    if grid.coordinate == "u":
        logs = logs + 0.5 * np.log(spec.family.f(x, spec.raw))
    if not np.all(np.isfinite(logs)):
        raise NonNormalizable(f"{spec.label()}: ground state overflows on the grid")
    return _normalized(grid.wrap(np.exp(logs - np.max(logs))), spec)


def ladder_state(spec: ModelSpec, n: int, grid: Optional[StateGrid] = None) -> GridFunction:
    """ψ_n ∝ A⁺(a₀) A⁺(a₁) … A⁺(a_{n-1}) ψ₀(·, a_n), normalized."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    grid = grid or state_grid(spec, n)
    psi = ground_state(_shifted(spec, n), grid)
    for k in range(n - 1, -1, -1):
        psi = apply_ladder(_shifted(spec, k), "+", psi)
    return _normalized(psi.with_values(_fix_sign(psi.values)), spec)


def overlap(psi: GridFunction, phi: GridFunction, window: slice = slice(None)) -> float:
    """|<ψ, φ>| / (‖ψ‖ ‖φ‖) with every integral restricted to ``window``."""
    a, b = psi.values[window], phi.values[window]
    num = integrate(a * b, psi.h)
    return abs(num) / math.sqrt(integrate(a * a, psi.h) * integrate(b * b, psi.h))


def eigenstate_on(grid: StateGrid, solution, k: int) -> GridFunction:
    """Eigensolver state ``k`` resampled onto ``grid`` in its representation."""
    if grid.coordinate == "u":
        from scipy.interpolate import CubicSpline

        phi = solution.phi(k)
        u = grid.nodes
        inside = (u > phi.interval.x1) & (u < phi.interval.x2)
        values = np.where(inside, CubicSpline(phi.x, phi.values)(u), 0.0)
    else:
        values = solution.state_on_x(k, grid.nodes)
    return grid.wrap(_fix_sign(values))


def _inner_sup(values: np.ndarray, window: slice) -> float:
    return float(np.max(np.abs(values[window])))


def test_function(spec: ModelSpec, grid: StateGrid) -> GridFunction:
    """(ψ₁ + ψ₂)/√2: smooth and normalizable, with A⁻ψ of order one, but no eigenstate."""
    psi1, psi2 = ladder_state(spec, 1, grid), ladder_state(spec, 2, grid)
    return psi1.with_values((psi1.values + psi2.values) / math.sqrt(2))


def intertwining_residual(
    spec: ModelSpec, psi: Optional[GridFunction] = None, grid: Optional[StateGrid] = None
) -> tuple[float, float]:
    """sup |A⁻H₋ψ - H₊A⁻ψ| and sup |A⁻H₋ψ| over the inner window.

    Both Hamiltonians are applied in their direct second-order form with
    the potentials V∓, so the identity is not a rearrangement of the same
    grid operations.
    """
    grid = grid or state_grid(spec, 2, n_points=INTERTWINING_POINTS)
    psi = psi if psi is not None else test_function(spec, grid)
    left = apply_ladder(spec, "-", apply_hamiltonian_direct(spec, "-", psi))
    right = apply_hamiltonian_direct(spec, "+", apply_ladder(spec, "-", psi))
    window = grid.inner_window()
    return _inner_sup(left.values - right.values, window), _inner_sup(left.values, window)


def eigen_residual(spec: ModelSpec, n: int, energy: float, grid: Optional[StateGrid] = None) -> tuple[float, float]:
    """sup |H₋ψₙ - E ψₙ| and sup |E ψₙ| over the inner window, ψₙ from the ladder."""
    grid = grid or state_grid(spec, n, n_points=EIGEN_CHECK_POINTS)
    psi = ladder_state(spec, n, grid)
    h_psi = apply_hamiltonian_direct(spec, "-", psi)
    window = grid.inner_window()
    return _inner_sup(h_psi.values - energy * psi.values, window), _inner_sup(energy * psi.values, window)


@dataclass(frozen=True)
class BoundaryReport:
    endpoint: str  # "x1" or "x2"
    limit_estimate: float  # extrapolated |ψ|² f at the endpoint, relative to its peak
    square_integrable: bool
    hermiticity_ok: bool
    threshold: float = HERMITICITY_RTOL


def _power_law_limit(dist: np.ndarray, w: np.ndarray, peak: float) -> float:
    """Relative limit of ``w`` as ``dist`` → 0 from a fit w ≈ C dist^p."""
    if np.all(w == 0):
        return 0.0
    if np.any(w <= 0):
        return float(np.max(np.abs(w))) / peak
    p, log_c = np.polyfit(np.log(dist), np.log(w), 1)
    if p > VANISHING_EXPONENT:
        return 0.0
    return float(math.exp(log_c) * np.min(dist) ** p) / peak


def _endpoint_report(spec: ModelSpec, psi: GridFunction, which: str, samples: int) -> BoundaryReport:
    t = psi.x
    if psi.coordinate == "u":
        x = np.asarray(spec.family.from_u(t, spec.raw), dtype=float)
        weighted = psi.values**2  # φ² = |ψ|² f
        dens = weighted / spec.family.f(x, spec.raw)
    else:
        x = t
        dens = psi.values**2
        weighted = dens * spec.family.f(x, spec.raw)
    peak_w, peak_d = float(np.max(weighted)), float(np.max(dens))
    # skip samples produced by one-sided stencils
    k = psi.edge
    sl = slice(k, k + samples) if which == "x1" else slice(psi.n_points - k - samples, psi.n_points - k)
    x_end = spec.domain.x1 if which == "x1" else spec.domain.x2
    ud = spec.family.u_domain(spec.raw)
    u_end = ud.x1 if which == "x1" else ud.x2

    if math.isfinite(x_end):
        limit = _power_law_limit(np.abs(x[sl] - x_end), weighted[sl], peak_w)
        d_sl = dens[sl]
        if np.all(d_sl > 0):
            slope = np.polyfit(np.log(np.abs(x[sl] - x_end)), np.log(d_sl), 1)[0]
            integrable = bool(slope > -0.9)
        else:
            integrable = True
    else:
        if psi.coordinate == "u" and math.isfinite(u_end):
            limit = _power_law_limit(np.abs(t[sl] - u_end), weighted[sl], peak_w)
        else:
            # truncated window: quadratic extrapolation to the cut
            edge = t[0] if which == "x1" else t[-1]
            coeffs = np.polyfit(t[sl] - edge, weighted[sl], 2)
            limit = abs(float(coeffs[-1])) / peak_w
        integrable = bool(np.max(dens[sl]) < TAIL_RTOL * peak_d)
    return BoundaryReport(which, limit, integrable, bool(limit < HERMITICITY_RTOL))


def boundary_check(spec: ModelSpec, psi: GridFunction, samples: int = 10) -> tuple[BoundaryReport, BoundaryReport]:
    """Square integrability and vanishing |ψ|² f at both ends of ``psi``'s grid.

    The last ``samples`` trustworthy values (edge-stencil samples are
    skipped) are extrapolated to each endpoint.  Where
    the endpoint is finite (in x, or in u for a u-grid) the fit is a power
    law C d^p in the distance d, and the limit counts as zero when p
    exceeds VANISHING_EXPONENT; square integrability then requires the
    exponent of |ψ|² in x to stay above -0.9 (1/x is the divergent case).
    At a truncated window edge the limit comes from a quadratic fit and
    the tail density must be below TAIL_RTOL of its peak.
    """
    return (
        _endpoint_report(spec, psi, "x1", samples),
        _endpoint_report(spec, psi, "x2", samples),
    )


def require_admissible(spec: ModelSpec, n_max: int) -> None:
    """Raise NonNormalizable unless every ground state behind ψ₀ … ψ_{n_max} is admissible.

    ψₙ is built on ψ₀ at a + nħ, so each shifted ground state must be square
    integrable with |ψ|² f → 0 at both ends.  Outside that region the
    algebraic spectrum no longer describes bound states.
    """
    for k in range(n_max + 1):
        shifted = _shifted(spec, k)
        for rep in boundary_check(shifted, ground_state(shifted)):
            if not (rep.square_integrable and rep.hermiticity_ok):
                raise NonNormalizable(
                    f"{spec.label()}: ground state at a + {k}ħ fails the boundary test at {rep.endpoint} "
                    f"(|psi|^2 f limit {rep.limit_estimate:.2e}); level {k} is not a bound state"
                )
