"""Finite-difference oracle for the spectrum of H_-.

The substitution u = ∫ dx / f, φ = sqrt(f) ψ turns H_- into the
constant-mass operator -ħ² d²/du² + V_-(x(u)) with the same eigenvalues
and the same L² norm.  That operator is discretized with the 3-point
stencil on a uniform u-grid (Dirichlet at both ends), diagonalized as a
symmetric tridiagonal matrix, and Richardson-extrapolated in h².
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .catalog import ModelSpec
from .errors import NonConvergent, TruncationUnsafe
from .families import Interval
from .operators import INFINITE_WINDOW, GridFunction, eval_V_minus


@dataclass(frozen=True)
class CanonicalMap:
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    u_domain: Interval


def build_canonical_map(spec: ModelSpec) -> CanonicalMap:
    fam, raw = spec.family, spec.raw
    return CanonicalMap(
        forward=lambda x: fam.to_u(x, raw),
        inverse=lambda u: fam.from_u(u, raw),
        u_domain=fam.u_domain(raw),
    )


def numeric_canonical_map(spec: ModelSpec, x_ref: Optional[float] = None) -> CanonicalMap:
    """u(x) by adaptive quadrature and x(u) by bracketed root finding.

    Independent of the closed-form antiderivatives; ``u`` is measured
    from ``x_ref`` (the domain midpoint, or the finite endpoint of a
    half-line, by default).
    """
    dom = spec.domain
    f = lambda t: float(spec.family.f(t, spec.raw))
    if x_ref is None:
        if dom.finite:
            x_ref = 0.5 * (dom.x1 + dom.x2)
        elif math.isfinite(dom.x1):
            x_ref = dom.x1 + 1.0
        elif math.isfinite(dom.x2):
            x_ref = dom.x2 - 1.0
        else:
            x_ref = 0.0

    def forward_scalar(x: float) -> float:
        return quad(lambda t: 1.0 / f(t), x_ref, x, epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def forward(x):
        return np.vectorize(forward_scalar, otypes=[float])(x)

    def inverse_scalar(u: float) -> float:
        lo, hi = dom.x1, dom.x2
        step = 1.0
        lo = x_ref - step if math.isinf(lo) else lo
        hi = x_ref + step if math.isinf(hi) else hi
        # expand brackets toward infinite ends
        while math.isinf(dom.x1) and forward_scalar(lo) > u:
            step *= 2
            lo = x_ref - step
        step = 1.0
        while math.isinf(dom.x2) and forward_scalar(hi) < u:
            step *= 2
            hi = x_ref + step
        eps = 1e-15 * max(1.0, abs(lo), abs(hi))
        return brentq(lambda t: forward_scalar(t) - u, lo + eps, hi - eps, xtol=1e-15, rtol=1e-15)

    def inverse(u):
        return np.vectorize(inverse_scalar, otypes=[float])(u)

    with np.errstate(all="ignore"):
        u1 = -math.inf if math.isinf(dom.x1) else forward_scalar(dom.x1)
        u2 = math.inf if math.isinf(dom.x2) else forward_scalar(dom.x2)
    return CanonicalMap(forward, inverse, Interval(u1, u2))


@dataclass(frozen=True)
class GridSettings:
    n_points: int = 4000  # intervals on the coarsest grid
    trunc_tol: float = 1e-10
    extrapolate: bool = True
    conv_tol: float = 1e-7
    max_extensions: int = 12
    max_refinements: int = 3


@dataclass
class EigenSolution:
    spec: ModelSpec
    eigenvalues: np.ndarray
    u: np.ndarray  # interior nodes of the finest grid
    vectors: np.ndarray  # columns: φ_k on ``u``, unit norm in u
    u_window: Interval
    raw_eigenvalues: dict[int, np.ndarray] = field(default_factory=dict)  # intervals -> values
    changes: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def h(self) -> float:
        return float(self.u[1] - self.u[0])

    def phi(self, k: int) -> GridFunction:
        """φ_k on the u-grid including the Dirichlet end nodes."""
        vals = np.concatenate([[0.0], self.vectors[:, k], [0.0]])
        return GridFunction(self.u_window, vals)

    def node_count(self, k: int, rel: float = 1e-6) -> int:
        v = self.vectors[:, k]
        v = v[np.abs(v) > rel * np.max(np.abs(v))]
        return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))

    def state_on_x(self, k: int, x) -> np.ndarray:
        """ψ_k(x) = φ_k(u(x)) / sqrt(f(x)); zero outside the truncation window."""
        x = np.asarray(x, dtype=float)
        cmap = build_canonical_map(self.spec)
        grid = self.phi(k)
        spline = CubicSpline(grid.x, grid.values)
        u = cmap.forward(x)
        inside = (u > self.u_window.x1) & (u < self.u_window.x2)
        phi = np.where(inside, spline(np.clip(u, self.u_window.x1, self.u_window.x2)), 0.0)
        return phi / np.sqrt(self.spec.family.f(x, self.spec.raw))

    def to_text(self, k: int, coordinate: str = "u") -> str:
        if coordinate == "u":
            return self.phi(k).to_text()
        if coordinate != "x":
            raise ValueError("coordinate must be 'u' or 'x'")
        cmap = build_canonical_map(self.spec)
        x = cmap.inverse(self.u)
        psi = self.vectors[:, k] / np.sqrt(self.spec.family.f(x, self.spec.raw))
        return "".join(f"{a:.16e} {b:.16e}\n" for a, b in zip(x, psi))

    def save(self, k: int, path: Union[str, Path], coordinate: str = "u") -> None:
        Path(path).write_text(self.to_text(k, coordinate))


_BISECTION_TOL = 2 * np.finfo(float).tiny


def _initial_window(spec: ModelSpec, cmap: CanonicalMap) -> tuple[float, float]:
    u1, u2 = cmap.u_domain.x1, cmap.u_domain.x2
    dom = spec.domain
    if math.isinf(u1) or math.isinf(u2):
        if dom.finite:
            anchor = 0.5 * (dom.x1 + dom.x2)
        elif math.isfinite(dom.x1):
            anchor = dom.x1 + 1.0
        elif math.isfinite(dom.x2):
            anchor = dom.x2 - 1.0
        else:
            anchor = 0.0
        ua = float(cmap.forward(anchor))
        if math.isinf(u1):
            u1 = ua - INFINITE_WINDOW
        if math.isinf(u2):
            u2 = ua + INFINITE_WINDOW
    return u1, u2


def _potential(spec: ModelSpec, cmap: CanonicalMap, u: np.ndarray) -> np.ndarray:
    x = cmap.inverse(u)
    return np.asarray(eval_V_minus(spec, x), dtype=float)


def _diagonalize(spec, cmap, u1, u2, intervals, n_states, vectors=False):
    h = (u2 - u1) / intervals
    u = u1 + h * np.arange(1, intervals)
    k = spec.hbar**2 / h**2
    diag = 2 * k + _potential(spec, cmap, u)
    off = np.full(u.size - 1, -k)
    # bisection to full precision; the default stopping width scales with
    # the matrix norm, which the wall values of V inflate
    opts = dict(select="i", select_range=(0, n_states - 1), tol=_BISECTION_TOL)
    if vectors:
        w, v = eigh_tridiagonal(diag, off, **opts)
        return u, w, v / math.sqrt(h)
    return u, eigh_tridiagonal(diag, off, eigvals_only=True, **opts), None


def _edge_ratio(v: np.ndarray, which: str, tail: int = 3) -> float:
    peak = np.max(np.abs(v))
    end = v[:tail] if which == "left" else v[-tail:]
    return float(np.max(np.abs(end)) / peak)


def solve_levels(spec: ModelSpec, n_max: int, grid: Optional[GridSettings] = None) -> EigenSolution:
    """Lowest ``n_max + 1`` eigenvalues of H_-, extrapolated to h → 0."""
    grid = grid or GridSettings()
    n_states = n_max + 1
    cmap = build_canonical_map(spec)
    u1, u2 = _initial_window(spec, cmap)
    open_left = math.isinf(cmap.u_domain.x1)
    open_right = math.isinf(cmap.u_domain.x2)
    intervals = grid.n_points
    h_target = (u2 - u1) / intervals

    # grow any truncated end until the boundary amplitudes are negligible
    for _ in range(grid.max_extensions + 1):
        _, _, vecs = _diagonalize(spec, cmap, u1, u2, intervals, n_states, vectors=True)
        bad_left = open_left and any(_edge_ratio(vecs[:, j], "left") >= grid.trunc_tol for j in range(n_states))
        bad_right = open_right and any(_edge_ratio(vecs[:, j], "right") >= grid.trunc_tol for j in range(n_states))
        if not (bad_left or bad_right):
            break
        width = u2 - u1
        if bad_left:
            u1 -= 0.5 * width
        if bad_right:
            u2 += 0.5 * width
        intervals = int(math.ceil((u2 - u1) / h_target))
    else:
        raise TruncationUnsafe(
            f"{spec.label()}: states up to n={n_max} still touch the truncation edge after "
            f"{grid.max_extensions} extensions"
        )

    # trim open ends back to where every target state is negligible, then
    # spend the full point budget on the tighter window
    h = (u2 - u1) / intervals
    u_nodes = u1 + h * np.arange(1, intervals)
    rel = np.max(np.abs(vecs) / np.max(np.abs(vecs), axis=0), axis=1)
    significant = np.nonzero(rel >= grid.trunc_tol)[0]
    pad = 0.05 * (u_nodes[significant[-1]] - u_nodes[significant[0]])
    if open_left:
        u1 = max(u1, u_nodes[significant[0]] - pad)
    if open_right:
        u2 = min(u2, u_nodes[significant[-1]] + pad)
    intervals = grid.n_points

    window = Interval(u1, u2)
    if not grid.extrapolate:
        u, w, v = _diagonalize(spec, cmap, u1, u2, intervals, n_states, vectors=True)
        return EigenSolution(spec, w, u, v, window, {intervals: w})

    raw: dict[int, np.ndarray] = {}

    def values(m: int) -> np.ndarray:
        if m not in raw:
            raw[m] = _diagonalize(spec, cmap, u1, u2, m, n_states)[1]
        return raw[m]

    def richardson(m: int) -> np.ndarray:
        return (4 * values(2 * m) - values(m)) / 3

    m = intervals
    for _ in range(grid.max_refinements + 1):
        coarse, fine = richardson(m), richardson(2 * m)
        change = np.abs(fine - coarse) / (1 + np.abs(fine))
        if np.all(change < grid.conv_tol):
            u, _, v = _diagonalize(spec, cmap, u1, u2, 4 * m, n_states, vectors=True)
            return EigenSolution(spec, fine, u, v, window, raw, change)
        m *= 2
    raise NonConvergent(
        f"{spec.label()}: extrapolated eigenvalues still move by {float(np.max(change)):.2e} "
        f"(tolerance {grid.conv_tol:.1e})"
    )
