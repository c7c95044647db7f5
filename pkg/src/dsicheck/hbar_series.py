"""ħ-expansion of the rationally extended deformed oscillator superpotential.

W(x, a, ħ) = Σ ħⁿ Wₙ(x, a) with

    W₀     = -(a+b) f / x + (a-b) |λ| x / f
    W₂ᵥ₊₁  = 0
    W₂ᵥ    = -16 b |λ| x f / D^{2ν},    D = 4 b f² + 2a - 2b,

and f = sqrt(1 - |λ| x²).  This module evaluates the terms, the pair sums
Σₖ Wₖ W_{s-k} and their closed form F_s, the coefficient-of-ħⁿ relations
the terms must satisfy, and the convergence of the partial sums to the
resummed superpotential.

Functions take ``x`` and ``a`` as floats, arrays or Jets; ``a`` defaults
to the model's own value.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Optional

import numpy as np

from .autodiff import Jet
from .catalog import ModelId, ModelSpec
from .errors import DivergentSeries, WrongModel

DEFAULT_ORDER = 20


def _require(spec: ModelSpec) -> None:
    if spec.id is not ModelId.DRHO_EXT1:
        raise WrongModel(f"the ħ-series is defined for DRHO_EXT1 only, got {spec.id}")


def _parts(spec: ModelSpec, x):
    lam = abs(spec.raw.lam)
    return spec.derived.b, lam, spec.family.f(x, spec.raw)


def denominator(x, a, spec: ModelSpec):
    b, _, f = _parts(spec, x)
    return 4 * b * f * f + 2 * a - 2 * b


def series_term(n: int, x, a=None, spec: Optional[ModelSpec] = None):
    """Wₙ(x, a)."""
    _require(spec)
    if n < 0:
        raise ValueError("series order must be nonnegative")
    a = spec.derived.a if a is None else a
    b, lam, f = _parts(spec, x)
    if n == 0:
        return -(a + b) * f / x + (a - b) * lam * x / f
    if n % 2:
        return 0.0 * x
    return -16 * b * lam * x * f / denominator(x, a, spec) ** n


def pair_sum(s: int, x, a=None, spec: Optional[ModelSpec] = None):
    """Σ_{k=0}^{s} Wₖ W_{s-k}, skipping the identically vanishing odd terms."""
    _require(spec)
    total = 0.0 * x
    for k in range(0, s + 1):
        if k % 2 or (s - k) % 2:
            continue
        total = total + series_term(k, x, a, spec) * series_term(s - k, x, a, spec)
    return total


def pair_sum_residual(s: int, x, a=None, spec: Optional[ModelSpec] = None) -> float:
    """max |Σₖ WₖW_{s-k} - F_s| relative to the larger of |F_s| and the largest summand.

    F_s changes sign inside the domain, so |F_s| alone is no usable scale
    near its zeros.
    """
    total = pair_sum(s, x, a, spec)
    closed = F_s(s, x, a, spec) if s % 2 == 0 else 0.0 * total
    scale = np.abs(closed)
    for k in range(0, s + 1, 2):
        if (s - k) % 2 == 0:
            scale = np.maximum(scale, np.abs(series_term(k, x, a, spec) * series_term(s - k, x, a, spec)))
    return float(np.max(np.abs(total - closed) / np.where(scale > 0, scale, 1.0)))


def _bracket(s: int, x, a, spec: ModelSpec):
    b, _, f = _parts(spec, x)
    f2 = f * f
    return -4 * b * (s - 2) * f2 * f2 + (2 * a + 4 * b * (s - 2)) * f2 - a + b


def F_s(s: int, x, a=None, spec: Optional[ModelSpec] = None):
    """32 b |λ| / D^s · {-4b(s-2) f⁴ + [2a + 4b(s-2)] f² - a + b}."""
    _require(spec)
    a = spec.derived.a if a is None else a
    b, lam, _ = _parts(spec, x)
    return 32 * b * lam * _bracket(s, x, a, spec) / denominator(x, a, spec) ** s


def F_s_a_derivative(s: int, m: int, x, a=None, spec: Optional[ModelSpec] = None):
    """∂ᵐ F_s / ∂aᵐ in closed form.

    The bracket is linear in a (slope 2f² - 1) and ∂D/∂a = 2, so Leibniz
    leaves two terms with ∂ʲ D^{-s} = (-2)ʲ s(s+1)…(s+j-1) D^{-s-j}.
    """
    _require(spec)
    a = spec.derived.a if a is None else a
    b, lam, f = _parts(spec, x)
    D = denominator(x, a, spec)

    def d_inv_power(j: int):
        rising = math.prod(range(s, s + j))
        return (-2) ** j * rising / D ** (s + j)

    out = _bracket(s, x, a, spec) * d_inv_power(m)
    if m >= 1:
        out = out + m * (2 * f * f - 1) * d_inv_power(m - 1)
    return 32 * b * lam * out


def derivative_identity_residual(
    n: int, s: int, x, a=None, spec: Optional[ModelSpec] = None, method: str = "closed"
) -> float:
    """Relative residual of ∂^{n-s}_a Σₖ WₖW_{s-k} = (-2)^{n-s} (n-2)!/(s-2)! Fₙ (even s).

    ``method="closed"`` differentiates F_s analytically; ``"jet"``
    differentiates the pair sum itself with Taylor arithmetic.
    """
    _require(spec)
    if s % 2 or not 2 <= s <= n:
        raise ValueError("need even s with 2 <= s <= n")
    a = spec.derived.a if a is None else a
    m = n - s
    if method == "closed":
        lhs = F_s_a_derivative(s, m, x, a, spec)
    elif method == "jet":
        x = np.asarray(x, dtype=float)
        aj = Jet.seed_a(a, px=0, pa=m, shape=x.shape)
        lhs = pair_sum(s, x, aj, spec).d(0, m) if m else pair_sum(s, x, a, spec)
    else:
        raise ValueError("method must be 'closed' or 'jet'")
    rhs = (-2) ** m * math.factorial(n - 2) / math.factorial(s - 2) * F_s(n, x, a, spec)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    return float(np.max(np.abs(lhs - rhs) / np.where(scale > 0, scale, 1.0)))


# -- coefficient-of-ħⁿ relations ------------------------------------------


def _jets(x, a, pa: int):
    x = np.asarray(x, dtype=float)
    return Jet.seed_x(x, px=1, pa=pa), Jet.seed_a(a, px=1, pa=pa, shape=x.shape)


def _relative(terms) -> float:
    terms = [np.asarray(t, dtype=float) for t in terms]
    total = np.abs(sum(terms))
    scale = np.max(np.abs(np.broadcast_arrays(*terms)), axis=0)
    return float(np.max(total / np.where(scale > 0, scale, 1.0)))


def _term_jets(n_max: int, xj, aj, spec):
    return [series_term(k, xj, aj, spec) for k in range(n_max + 1)]


def _pair_jet(W, s: int):
    total = 0.0
    for k in range(s + 1):
        if k % 2 or (s - k) % 2:
            continue
        total = total + W[k] * W[s - k]
    return total


def order_terms(n: int, x, a=None, spec: Optional[ModelSpec] = None) -> list[np.ndarray]:
    """The separate terms of the coefficient-of-ħⁿ relation (their sum must vanish).

    n = 1:  2f ∂ₓW₀ and -∂ₐ(W₀² + g) with g = 4a²|λ|
    n = 2:  f ∂ₓW₁ and -∂ₐ(W₀W₁)
    n ≥ 3:  2f ∂ₓW_{n-1}, -Σ_{s=1}^{n-1} Σₖ ∂^{n-s}_a(WₖW_{s-k})/(n-s)!,
            (n-2)/n! f ∂ⁿW₀/∂a^{n-1}∂x and f Σ_{k=2}^{n-1} ∂ᵏW_{n-k}/∂a^{k-1}∂x /(k-1)!
    """
    _require(spec)
    if n < 1:
        raise ValueError("order must be >= 1")
    a = spec.derived.a if a is None else a
    b, lam, f = _parts(spec, np.asarray(x, dtype=float))
    pa = max(1, n - 1)
    xj, aj = _jets(x, a, pa)
    W = _term_jets(n, xj, aj, spec)
    if n == 1:
        g = 4 * aj * aj * lam
        return [2 * f * W[0].d(1, 0), -(W[0] * W[0] + g).d(0, 1)]
    if n == 2:
        return [f * _d(W[1], 1, 0), -_d(W[0] * W[1], 0, 1)]
    pair_part = 0.0
    for s in range(1, n):
        if s % 2:
            continue  # odd pair sums vanish term by term
        pair_part = pair_part + _pair_jet(W, s).d(0, n - s) / math.factorial(n - s)
    mixed_w0 = _mixed(W[0], n - 1, x, a, spec)
    ladder = 0.0
    for k in range(2, n):
        ladder = ladder + _d(W[n - k], 1, k - 1) / math.factorial(k - 1)
    shape = np.shape(np.asarray(x, dtype=float))
    return [
        np.broadcast_to(2 * f * _d(W[n - 1], 1, 0), shape),
        np.broadcast_to(-np.asarray(pair_part), shape),
        np.broadcast_to((n - 2) / math.factorial(n) * f * mixed_w0, shape),
        np.broadcast_to(f * np.asarray(ladder), shape),
    ]


def _d(w, i: int, j: int):
    return w.d(i, j) if isinstance(w, Jet) else 0.0 * np.asarray(w)


def _mixed(w0, order_a: int, x, a, spec):
    """∂^{order_a+1} W₀ / ∂a^{order_a} ∂x, reusing the jet when its order suffices."""
    if w0.orders[1] >= order_a:
        return w0.d(1, order_a)
    xj, aj = _jets(x, a, order_a)
    return series_term(0, xj, aj, spec).d(1, order_a)


def order_n_residual(n: int, x, a=None, spec: Optional[ModelSpec] = None) -> float:
    """Relative residual of the coefficient-of-ħⁿ relation, every term evaluated directly."""
    return _relative(order_terms(n, x, a, spec))


SUMS = ("pair", "gradient", "ladder")


def summation_closed_forms(n: int, x, a=None, spec: Optional[ModelSpec] = None, flip: Optional[str] = None):
    """Closed values of the three sums in the n ≥ 3 relation, as multiples of Fₙ.

    Returns (pair part, 2f ∂ₓW_{n-1}, ladder part).  ``flip`` names one sum
    whose even/odd branch is swapped; it exists as a negative control.
    """
    if flip is not None and flip not in SUMS:
        raise ValueError(f"flip must be one of {SUMS}")
    Fn = F_s(n, x, a, spec)
    p = 3 ** (n - 2)
    even = {"pair": 0.5 * (p - 1), "gradient": 0.0, "ladder": 0.5 * (p - 1)}
    odd = {"pair": -0.5 * (p + 1), "gradient": -2.0, "ladder": -0.5 * (p - 3)}
    chosen, other = (even, odd) if n % 2 == 0 else (odd, even)
    return tuple((other if name == flip else chosen)[name] * Fn for name in SUMS)


def summation_identity_residuals(n: int, x, a=None, spec: Optional[ModelSpec] = None) -> tuple[float, float, float]:
    """Relative mismatch of each directly evaluated sum against its closed form."""
    if n < 3:
        raise ValueError("order must be >= 3")
    direct = order_terms(n, x, a, spec)
    closed = summation_closed_forms(n, x, a, spec)
    pairs = [(-direct[1], closed[0]), (direct[0], closed[1]), (direct[3], closed[2])]
    Fn = np.abs(F_s(n, x, a, spec))
    return tuple(float(np.max(np.abs(d - c) / np.maximum(np.abs(c), Fn))) for d, c in pairs)


def order_n_parity_residual(
    n: int, x, a=None, spec: Optional[ModelSpec] = None, flip: Optional[str] = None
) -> float:
    """The n ≥ 3 relation assembled from the closed even/odd sums, relative to |Fₙ|.

    Vanishes for the correct branches.  Swapping the branch of a single
    sum (``flip="pair"``, ``"gradient"`` or ``"ladder"``) leaves a remainder
    of order Fₙ; swapping all of them together cancels again.
    """
    _require(spec)
    if n < 3:
        raise ValueError("order must be >= 3")
    pair, grad, ladder = summation_closed_forms(n, x, a, spec, flip)
    # the mixed a-derivative of W₀ vanishes beyond first order in a
    total = grad - pair + ladder
    return float(np.max(np.abs(total) / np.abs(F_s(n, x, a, spec))))


def general_order_residual(n: int, x, a=None, spec: Optional[ModelSpec] = None) -> float:
    """The unreduced coefficient-of-ħⁿ relation, including the Σ WₖW_{n-k} and g terms."""
    _require(spec)
    if n < 1:
        raise ValueError("order must be >= 1")
    a = spec.derived.a if a is None else a
    b, lam, f = _parts(spec, np.asarray(x, dtype=float))
    xj, aj = _jets(x, a, n)
    W = _term_jets(n, xj, aj, spec)
    g = 4 * aj * aj * lam
    terms = [_d(_pair_jet(W, n), 0, 0) + 0 * f, f * _d(W[n - 1], 1, 0)]
    for s in range(0, n + 1):
        if s % 2:
            continue
        terms.append(-_pair_jet(W, s).d(0, n - s) / math.factorial(n - s))
    for k in range(1, n + 1):
        terms.append(f * _d(W[n - k], 1, k - 1) / math.factorial(k - 1))
    terms.append(-np.broadcast_to(g.d(0, n) / math.factorial(n), np.shape(f)))
    return _relative(terms)


# -- resummation -------------------------------------------------------------


def partial_sum(N: int, x, spec: ModelSpec, a=None, hbar: Optional[float] = None):
    _require(spec)
    h = spec.hbar if hbar is None else hbar
    return sum(h**n * series_term(n, x, a, spec) for n in range(0, N + 1, 2))


def resummed_tail(x, spec: ModelSpec, a=None, hbar: Optional[float] = None):
    """Σ_{ν≥1} ħ^{2ν} W₂ᵥ = -16 ħ² b |λ| x f / (D² - ħ²)."""
    _require(spec)
    a = spec.derived.a if a is None else a
    h = spec.hbar if hbar is None else hbar
    b, lam, f = _parts(spec, x)
    D = denominator(x, a, spec)
    return -16 * h * h * b * lam * x * f / (D * D - h * h)


def closed_correction(x, spec: ModelSpec, a=None, hbar: Optional[float] = None):
    """-8 ħ b |λ| x f (1/(D - ħ) - 1/(D + ħ)), the ħ-dependent part of W."""
    _require(spec)
    a = spec.derived.a if a is None else a
    h = spec.hbar if hbar is None else hbar
    b, lam, f = _parts(spec, x)
    D = denominator(x, a, spec)
    return -8 * h * b * lam * x * f * (1 / (D - h) - 1 / (D + h))


def convergence_ratio(x, spec: ModelSpec, a=None) -> np.ndarray:
    a = spec.derived.a if a is None else a
    return (spec.hbar / denominator(x, a, spec)) ** 2


def partial_sum_error(N: int, x, spec: ModelSpec, a=None) -> float:
    """max |Σ_{n≤N} ħⁿWₙ - W| over ``x``, W being the closed superpotential."""
    _require(spec)
    if N < 0 or N % 2:
        raise ValueError("N must be a nonnegative even integer")
    a = spec.derived.a if a is None else a
    D = np.asarray(denominator(x, a, spec), dtype=float)
    if np.any(spec.hbar >= np.abs(D)):
        raise DivergentSeries(f"ħ = {spec.hbar} is not below |D| = {float(np.min(np.abs(D))):.6g}")
    exact = spec.family.W(x, a, spec)
    return float(np.max(np.abs(partial_sum(N, x, spec, a) - exact)))


def convergence_table(x: float, spec: ModelSpec, N_max: int = DEFAULT_ORDER) -> list[tuple[int, float]]:
    return [(N, partial_sum_error(N, x, spec)) for N in range(0, N_max + 1, 2)]


def convergence_csv(rows: list[tuple[int, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "error"])
    for N, err in rows:
        writer.writerow([N, repr(err)])
    return buf.getvalue()
