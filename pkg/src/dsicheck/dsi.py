"""Deformed shape-invariance identity and its ħ-power reductions.

All partial derivatives come from :class:`~dsicheck.autodiff.Jet`
arithmetic, so residuals sit at rounding level rather than at
finite-difference level.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .autodiff import Jet
from .catalog import ModelSpec
from .errors import ExplicitHbarModel
from .operators import _check_inside, interior_points

DSI_RTOL = 1e-11

Superpotential = Callable[[object, object, ModelSpec], object]


@dataclass(frozen=True)
class ResidualSample:
    x: np.ndarray
    residual: np.ndarray
    scale: np.ndarray

    @property
    def relative(self) -> np.ndarray:
        return np.abs(self.residual) / self.scale

    @property
    def max_relative(self) -> float:
        return float(np.max(self.relative))

    def to_csv(self, model: str, tolerance: float = DSI_RTOL, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(["model", "x", "residual", "scale", "pass"])
        rel = np.atleast_1d(self.relative)
        for x, r, s, q in zip(
            np.atleast_1d(self.x), np.atleast_1d(self.residual), np.atleast_1d(self.scale), rel
        ):
            writer.writerow([model, repr(float(x)), repr(float(r)), repr(float(s)), str(bool(q < tolerance)).lower()])
        return buf.getvalue()


def _positive(scale) -> np.ndarray:
    scale = np.asarray(scale, dtype=float)
    return np.where(scale > 0, scale, np.finfo(float).tiny)


def _default_points(spec: ModelSpec, x) -> np.ndarray:
    if x is None:
        return interior_points(spec, 200)
    x = np.asarray(x, dtype=float)
    _check_inside(spec, x)
    return x


def dsi_residual(spec: ModelSpec, x=None, g_offset: float = 0.0) -> ResidualSample:
    """[W² + ħ f W' + g](a) - [W² - ħ f W' + g](a + ħ).

    ``g_offset`` perturbs g on the left-hand side only and exists for
    negative controls.  ``x`` defaults to the 200-point interior mesh.
    """
    x = _default_points(spec, x)
    fam, h = spec.family, spec.hbar
    a0 = spec.derived.a
    f = np.asarray(fam.f(x, spec.raw), dtype=float)
    xj = Jet.seed_x(x, px=1)
    w0 = fam.W(xj, a0, spec)
    w1 = fam.W(xj, a0 + h, spec)
    g0 = float(fam.g(a0, spec)) + g_offset
    g1 = float(fam.g(a0 + h, spec))
    left = w0.d(0, 0) ** 2 + h * f * w0.d(1, 0) + g0
    right = w1.d(0, 0) ** 2 - h * f * w1.d(1, 0) + g1
    scale = np.max(
        np.abs(
            [
                w0.d(0, 0) ** 2,
                w1.d(0, 0) ** 2,
                h * f * w0.d(1, 0),
                h * f * w1.d(1, 0),
                np.full_like(x, g0),
                np.full_like(x, g1),
            ]
        ),
        axis=0,
    )
    return ResidualSample(x, left - right, _positive(scale))


def _require_hbar_free(spec: ModelSpec) -> None:
    if spec.hbar_explicit:
        raise ExplicitHbarModel(f"{spec.label()}: superpotential depends explicitly on hbar")


def condition1_residual(spec: ModelSpec, x=None) -> ResidualSample:
    """W ∂W/∂a - f ∂W/∂x + ½ dg/da (the coefficient of ħ)."""
    _require_hbar_free(spec)
    x = _default_points(spec, x)
    fam = spec.family
    xj = Jet.seed_x(x, px=1, pa=1)
    aj = Jet.seed_a(spec.derived.a, px=1, pa=1, shape=x.shape)
    w = fam.W(xj, aj, spec)
    g = fam.g(Jet.seed_a(spec.derived.a, px=0, pa=1), spec)
    dg = float(g.d(0, 1))
    f = np.asarray(fam.f(x, spec.raw), dtype=float)
    terms = [w.d(0, 0) * w.d(0, 1), -f * w.d(1, 0), np.full_like(x, 0.5 * dg)]
    scale = np.max(np.abs(terms), axis=0)
    return ResidualSample(x, sum(terms), _positive(scale))


def condition2_residual(
    spec: ModelSpec, x=None, superpotential: Optional[Superpotential] = None
) -> ResidualSample:
    """The mixed partial ∂³W/∂a²∂x, which must vanish identically.

    ``superpotential`` replaces the family's W (used for synthetic
    negative controls); it receives ``(x, a, spec)``.
    """
    _require_hbar_free(spec)
    x = _default_points(spec, x)
    W = superpotential or spec.family.W
    xj = Jet.seed_x(x, px=1, pa=2)
    aj = Jet.seed_a(spec.derived.a, px=1, pa=2, shape=x.shape)
    w = W(xj, aj, spec)
    # scale: size of the a- and x-derivatives that the mixed partial is built from
    scale = np.max(np.abs([w.d(0, 0), w.d(1, 0), w.d(0, 1), w.d(1, 1)]), axis=0)
    return ResidualSample(x, np.asarray(w.d(1, 2), dtype=float) * np.ones_like(x), _positive(scale))
