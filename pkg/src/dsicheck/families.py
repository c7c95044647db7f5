"""Formula tables for the eleven catalog families.

Each family bundles the deforming function f, the superpotential W(x, a),
the undeformed-frame potential V, the shift function g(a), the tabulated
closed-form level energies, and the point-canonical map u = ∫ dx / f.

Formulas accept floats, arrays, or :class:`~dsicheck.autodiff.Jet` values
for ``x`` and ``a`` so that exact partial derivatives come for free.
Parameters held fixed under the partner shift (b, ħ, raw parameters) are
always plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from . import autodiff as ad
from .errors import ConstraintViolation

if TYPE_CHECKING:
    from .catalog import ModelSpec, RawParams

INF = math.inf


@dataclass(frozen=True)
class Interval:
    x1: float
    x2: float

    def __post_init__(self):
        if not self.x1 < self.x2:
            raise ValueError(f"empty interval ({self.x1}, {self.x2})")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.x1) and math.isfinite(self.x2)

    @property
    def length(self) -> float:
        return self.x2 - self.x1

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all((x > self.x1) & (x < self.x2)))


@dataclass(frozen=True)
class DerivedParams:
    a: float
    b: Optional[float] = None
    delta: Optional[float] = None
    delta_plus: Optional[float] = None
    delta_minus: Optional[float] = None


def _require(ok: bool, text: str) -> None:
    if not ok:
        raise ConstraintViolation(f"constraint violated: {text}")


def _check_l(raw: "RawParams") -> None:
    l = raw.l
    _require(l >= 0 and float(l).is_integer(), "l in {0, 1, 2, ...}")


class Family:
    """One row of the potential/superpotential/spectrum tables."""

    tag: str = ""
    params: tuple[str, ...] = ()
    hbar_explicit = False

    # -- parameters -------------------------------------------------------

    def check(self, raw: "RawParams") -> None:
        raise NotImplementedError

    def derive(self, raw: "RawParams") -> DerivedParams:
        raise NotImplementedError

    def domain(self, raw: "RawParams") -> Interval:
        raise NotImplementedError

    # -- functions of x ---------------------------------------------------

    def f(self, x, raw: "RawParams"):
        raise NotImplementedError

    def W(self, x, a, spec: "ModelSpec"):
        raise NotImplementedError

    def V(self, x, raw: "RawParams"):
        raise NotImplementedError

    # -- spectrum ---------------------------------------------------------

    def g(self, a, spec: "ModelSpec"):
        raise NotImplementedError

    def closed_energy(self, n: int, raw: "RawParams") -> float:
        raise NotImplementedError

    # -- point-canonical map ----------------------------------------------

    def to_u(self, x, raw: "RawParams"):
        raise NotImplementedError

    def from_u(self, u, raw: "RawParams"):
        raise NotImplementedError

    def u_domain(self, raw: "RawParams") -> Interval:
        dom = self.domain(raw)
        with np.errstate(all="ignore"):
            u1 = -INF if dom.x1 == -INF else float(self.to_u(dom.x1, raw))
            u2 = INF if dom.x2 == INF else float(self.to_u(dom.x2, raw))
        return Interval(u1, u2)


class PoschlTeller(Family):
    tag = "PT"
    params = ("A", "alpha")

    def check(self, raw):
        _require(raw.A > raw.hbar, "A > hbar")
        _require(raw.alpha > -1 and raw.alpha != 0, "-1 < alpha != 0")

    def derive(self, raw):
        h, al, A = raw.hbar, raw.alpha, raw.A
        delta = math.sqrt((1 + al) ** 2 * h**2 + 4 * A * (A - h))
        return DerivedParams(a=((1 + al) * h + delta) / (2 * (1 + al)), delta=delta)

    def domain(self, raw):
        return Interval(-math.pi / 2, math.pi / 2)

    def f(self, x, raw):
        return 1 + raw.alpha * ad.sin(x) ** 2

    def W(self, x, a, spec):
        return (1 + spec.raw.alpha) * a * ad.tan(x)

    def V(self, x, raw):
        return raw.A * (raw.A - raw.hbar) * ad.sec(x) ** 2

    def g(self, a, spec):
        return (1 + spec.raw.alpha) * a * a

    def closed_energy(self, n, raw):
        h, al = raw.hbar, raw.alpha
        delta = self.derive(raw).delta
        return h**2 * (1 + al) * n * (n + 1) + h * delta * n

    def to_u(self, x, raw):
        s = math.sqrt(1 + raw.alpha)
        with np.errstate(over="ignore"):
            return np.arctan(s * np.tan(x)) / s

    def from_u(self, u, raw):
        s = math.sqrt(1 + raw.alpha)
        return np.arctan(np.tan(s * np.asarray(u)) / s)

    def u_domain(self, raw):
        s = math.sqrt(1 + raw.alpha)
        return Interval(-math.pi / (2 * s), math.pi / (2 * s))


class RadialOscillator(Family):
    tag = "RHO"
    params = ("omega", "l", "alpha")

    def check(self, raw):
        _require(raw.alpha > 0, "alpha > 0")
        _require(raw.omega > 0, "omega > 0")
        _check_l(raw)

    def derive(self, raw):
        h, al, w, L = raw.hbar, raw.alpha, raw.omega, raw.l + 1
        delta = math.sqrt(w * w + h * h * al * al)
        return DerivedParams(
            a=0.5 * (L + 0.5 * h + delta / (2 * al)),
            b=0.5 * (L - 0.5 * h - delta / (2 * al)),
            delta=delta,
        )

    def domain(self, raw):
        return Interval(0.0, INF)

    def f(self, x, raw):
        return 1 + raw.alpha * x * x

    def W(self, x, a, spec):
        al, b = spec.raw.alpha, spec.derived.b
        return a * (-1 / x + al * x) - b * (1 / x + al * x)

    def V(self, x, raw):
        L = raw.l + 1
        return 0.25 * raw.omega**2 * x * x + L * (L - raw.hbar) / (x * x)

    def g(self, a, spec):
        return 4 * spec.raw.alpha * a * a

    def closed_energy(self, n, raw):
        h, al, L = raw.hbar, raw.alpha, raw.l + 1
        delta = self.derive(raw).delta
        return 4 * h * al * n * ((n + 0.5) * h + L) + 2 * h * n * delta

    def to_u(self, x, raw):
        r = math.sqrt(raw.alpha)
        return np.arctan(r * np.asarray(x)) / r

    def from_u(self, u, raw):
        r = math.sqrt(raw.alpha)
        return np.tan(r * np.asarray(u)) / r

    def u_domain(self, raw):
        return Interval(0.0, math.pi / (2 * math.sqrt(raw.alpha)))


class ScarfI(Family):
    tag = "S"
    params = ("A", "B", "alpha")

    def check(self, raw):
        _require(raw.A - raw.hbar > raw.B > 0, "A - hbar > B > 0")
        _require(0 < abs(raw.alpha) < 1, "0 < |alpha| < 1")

    def derive(self, raw):
        h, al, A, B = raw.hbar, raw.alpha, raw.A, raw.B
        dp = math.sqrt(0.25 * h * h * (1 - al) ** 2 + (A + B) * (A + B - h))
        dm = math.sqrt(0.25 * h * h * (1 + al) ** 2 + (A - B) * (A - B - h))
        return DerivedParams(
            a=0.5 * (h + (al - 1) / (2 * al) * dp + (al + 1) / (2 * al) * dm),
            b=((al + 1) * dp + (al - 1) * dm) / (4 * al),
            delta_plus=dp,
            delta_minus=dm,
        )

    def domain(self, raw):
        return Interval(-math.pi / 2, math.pi / 2)

    def f(self, x, raw):
        return 1 + raw.alpha * ad.sin(x)

    def W(self, x, a, spec):
        al, b = spec.raw.alpha, spec.derived.b
        t, s = ad.tan(x), ad.sec(x)
        return a * (t + al * s) + b * (t - al * s)

    def V(self, x, raw):
        A, B, h = raw.A, raw.B, raw.hbar
        s = ad.sec(x)
        return (A * (A - h) + B * B) * s * s - B * (2 * A - h) * s * ad.tan(x)

    def g(self, a, spec):
        al, b = spec.raw.alpha, spec.derived.b
        return (1 - al * al) * a * a + 2 * (1 + al * al) * a * b

    def closed_energy(self, n, raw):
        h, al = raw.hbar, raw.alpha
        d = self.derive(raw)
        return h * h * (1 - al * al) * n * (n + 1) + h * ((1 + al) * d.delta_plus + (1 - al) * d.delta_minus) * n

    def to_u(self, x, raw):
        al = raw.alpha
        c = math.sqrt(1 - al * al)
        return 2 / c * np.arctan((np.tan(np.asarray(x) / 2) + al) / c)

    def from_u(self, u, raw):
        al = raw.alpha
        c = math.sqrt(1 - al * al)
        return 2 * np.arctan(c * np.tan(c * np.asarray(u) / 2) - al)


class Coulomb(Family):
    tag = "C"
    params = ("e2", "l", "alpha")

    def check(self, raw):
        _require(raw.alpha > 0, "alpha > 0")
        _check_l(raw)

    def derive(self, raw):
        h, al, e2, L = raw.hbar, raw.alpha, raw.e2, raw.l + 1
        return DerivedParams(
            a=-0.25 * (e2 + L * (al * (L - h) - 4)),
            b=0.25 * (e2 + al * L * (L - h)),
        )

    def domain(self, raw):
        return Interval(0.0, INF)

    def f(self, x, raw):
        return 1 + raw.alpha * x

    def W(self, x, a, spec):
        al, b = spec.raw.alpha, spec.derived.b
        s = a + b
        return -s / x + 2 * b / s - 0.5 * al * s

    def V(self, x, raw):
        L = raw.l + 1
        return -raw.e2 / x + L * (L - raw.hbar) / (x * x)

    def g(self, a, spec):
        al, b = spec.raw.alpha, spec.derived.b
        s = a + b
        return -4 * b * b / (s * s) - 0.25 * al * al * a * (a + 2 * b)

    def closed_energy(self, n, raw):
        h, al, e2, L = raw.hbar, raw.alpha, raw.e2, raw.l + 1
        return (
            h * n * (h * n + 2 * L)
            * (e2 - h * al * L * (n + 1))
            * (e2 + al * L * (h * n + 2 * L - h))
            / (4 * L * L * (L + n * h) ** 2)
        )

    def to_u(self, x, raw):
        return np.log1p(raw.alpha * np.asarray(x)) / raw.alpha

    def from_u(self, u, raw):
        return np.expm1(raw.alpha * np.asarray(u)) / raw.alpha


class Morse(Family):
    tag = "M"
    params = ("A", "B", "alpha")

    def check(self, raw):
        _require(raw.A > 0 and raw.B > 0, "A, B > 0")
        _require(raw.alpha > 0, "alpha > 0")

    def derive(self, raw):
        h, al, A, B = raw.hbar, raw.alpha, raw.A, raw.B
        delta = math.sqrt(4 * B * B + h * h * al * al)
        return DerivedParams(
            a=-(B * B + al * (B * (2 * A + h) - 2 * h * h) - 2 * h * delta) / (4 * h * al),
            b=B / (4 * h * al) * (B + al * (2 * A + h)),
            delta=delta,
        )

    def domain(self, raw):
        return Interval(-INF, INF)

    def f(self, x, raw):
        return 1 + raw.alpha * ad.exp(-x)

    def W(self, x, a, spec):
        al, b, h = spec.raw.alpha, spec.derived.b, spec.raw.hbar
        s = a + b
        return -al * s * ad.exp(-x) - 0.5 * s + 2 * h * b / (al * s)

    def V(self, x, raw):
        e = ad.exp(-x)
        return raw.B**2 * e * e - raw.B * (2 * raw.A + raw.hbar) * e

    def g(self, a, spec):
        al, b, h = spec.raw.alpha, spec.derived.b, spec.raw.hbar
        s = a + b
        return -4 * h * h * b * b / (al * al * s * s) - 0.25 * a * (a + 2 * b)

    def closed_energy(self, n, raw):
        h, al, A, B = raw.hbar, raw.alpha, raw.A, raw.B
        D = self.derive(raw).delta
        return (
            h * n * (D + h * al * (n + 1))
            * (2 * B * (2 * A + h) - h * (D + al * h) * (n + 1))
            * (4 * B * B + 2 * al * B * (2 * A + h) + h * al * (D + h * al) * (n + 1))
            / ((D + h * al) ** 2 * (D + (2 * n + 1) * h * al) ** 2)
        )

    def to_u(self, x, raw):
        x = np.asarray(x, dtype=float)
        # log(e^x + alpha), arranged to avoid overflow on either side
        return np.where(x > 0, x + np.log1p(raw.alpha * np.exp(-np.abs(x))), np.log(np.exp(np.minimum(x, 0)) + raw.alpha))

    def from_u(self, u, raw):
        u = np.asarray(u, dtype=float)
        return u + np.log1p(-raw.alpha * np.exp(-u))

    def u_domain(self, raw):
        return Interval(math.log(raw.alpha), INF)


class Eckart(Family):
    tag = "E"
    params = ("A", "B", "alpha")

    def check(self, raw):
        _require(raw.A >= 1.5 * raw.hbar, "A >= 3/2 hbar")
        _require(raw.B > raw.A**2, "B > A^2")
        _require(raw.alpha > -2 and raw.alpha != 0, "-2 < alpha != 0")

    def derive(self, raw):
        h, al, A, B = raw.hbar, raw.alpha, raw.A, raw.B
        return DerivedParams(
            a=(-B + 2 * h * A - 0.5 * al * A * (A - h)) / (2 * h),
            b=(B + 0.5 * al * A * (A - h)) / (2 * h),
        )

    def domain(self, raw):
        return Interval(0.0, INF)

    def f(self, x, raw):
        return 1 + raw.alpha * ad.exp(-x) * ad.sinh(x)

    def W(self, x, a, spec):
        al, b, h = spec.raw.alpha, spec.derived.b, spec.raw.hbar
        s = a + b
        return -s * ad.coth(x) + 2 * h * b / s - 0.5 * al * s

    def V(self, x, raw):
        A, h = raw.A, raw.hbar
        return A * (A - h) * ad.csch(x) ** 2 - 2 * raw.B * ad.coth(x)

    def g(self, a, spec):
        al, b, h = spec.raw.alpha, spec.derived.b, spec.raw.hbar
        s = a + b
        return -4 * h * h * b * b / (s * s) - 0.25 * (al + 2) ** 2 * a * (a + 2 * b)

    def closed_energy(self, n, raw):
        h, al, A, B = raw.hbar, raw.alpha, raw.A, raw.B
        An = A + n * h
        return (
            h * n * (2 * A + n * h) / (4 * A * A * An * An)
            * (2 * B + 2 * A * An + al * A * (2 * A + (n - 1) * h))
            * (2 * B - 2 * A * An - h * al * A * (n + 1))
        )

    def to_u(self, x, raw):
        c, k = 1 + raw.alpha / 2, raw.alpha / 2
        x = np.asarray(x, dtype=float)
        return (2 * x + np.log(c - k * np.exp(-2 * x))) / (2 * c)

    def from_u(self, u, raw):
        c, k = 1 + raw.alpha / 2, raw.alpha / 2
        u = np.asarray(u, dtype=float)
        return c * u + 0.5 * np.log((1 + k * np.exp(-2 * c * u)) / c)


class RosenMorseI(Family):
    tag = "RM"
    params = ("A", "B", "alpha", "beta")

    def check(self, raw):
        _require(raw.A >= 1.5 * raw.hbar, "A >= 3/2 hbar")
        _require(raw.beta > -1, "beta > -1")
        _require(abs(raw.alpha) / 2 < math.sqrt(1 + raw.beta), "|alpha|/2 < sqrt(1 + beta)")

    def derive(self, raw):
        h, al, A, B = raw.hbar, raw.alpha, raw.A, raw.B
        return DerivedParams(
            a=(B + 2 * h * A - 0.5 * al * A * (A - h)) / (2 * h),
            b=(-B + 0.5 * al * A * (A - h)) / (2 * h),
        )

    def domain(self, raw):
        return Interval(0.0, math.pi)

    def f(self, x, raw):
        s = ad.sin(x)
        return 1 + s * (raw.alpha * ad.cos(x) + raw.beta * s)

    def W(self, x, a, spec):
        al, b, h = spec.raw.alpha, spec.derived.b, spec.raw.hbar
        s = a + b
        return -s * ad.cot(x) + 2 * h * b / s - 0.5 * al * s

    def V(self, x, raw):
        A, h = raw.A, raw.hbar
        return A * (A - h) * ad.csc(x) ** 2 + 2 * raw.B * ad.cot(x)

    def g(self, a, spec):
        al, be, b, h = spec.raw.alpha, spec.raw.beta, spec.derived.b, spec.raw.hbar
        s = a + b
        return -4 * h * h * b * b / (s * s) - 0.25 * (al * al - 4 * be - 4) * a * (a + 2 * b)

    def closed_energy(self, n, raw):
        # literal tabulated form; see the RM TableMismatch in the spectrum reports
        h, al, be, A, B = raw.hbar, raw.alpha, raw.beta, raw.A, raw.B
        An = A + n * h
        return (
            h * n * (2 * A + n * h) / (4 * A * A * An * An)
            * (
                4 * A * A * An * An
                + 4 * B * B
                - 4 * al * B * A * (A - h)
                - h * al * al * A * A * (2 * A - h + n * (2 * A + n * h))
                - 4 * be * A * A * An * An
            )
        )

    def _s(self, raw):
        return math.sqrt(4 * (1 + raw.beta) - raw.alpha**2)

    def to_u(self, x, raw):
        s = self._s(raw)
        x = np.asarray(x, dtype=float)
        t = np.cos(x) / np.sin(x)
        return -2 / s * np.arctan((2 * t + raw.alpha) / s)

    def from_u(self, u, raw):
        s = self._s(raw)
        t = (s * np.tan(-s * np.asarray(u) / 2) - raw.alpha) / 2
        return math.pi / 2 - np.arctan(t)

    def u_domain(self, raw):
        s = self._s(raw)
        return Interval(-math.pi / s, math.pi / s)


class ShiftedOscillator(Family):
    tag = "SHO"
    params = ("omega", "d", "alpha", "beta")

    def check(self, raw):
        _require(raw.alpha > raw.beta**2 >= 0, "alpha > beta^2 >= 0")
        _require(raw.omega > 0, "omega > 0")

    def derive(self, raw):
        h, al, be, w, d = raw.hbar, raw.alpha, raw.beta, raw.omega, raw.d
        delta = math.sqrt(w * w + h * h * al * al)
        return DerivedParams(
            a=0.5 * h * (-h * be / (4 * al) * w * w + 1 + delta / (h * al) - 0.5 * d * h * w),
            b=0.5 * h * h * w * (be / (4 * al) * w + 0.5 * d),
            delta=delta,
        )

    def domain(self, raw):
        return Interval(-INF, INF)

    def f(self, x, raw):
        return 1 + raw.alpha * x * x + 2 * raw.beta * x

    def W(self, x, a, spec):
        al, be, b, h = spec.raw.alpha, spec.raw.beta, spec.derived.b, spec.raw.hbar
        s = a + b
        return s * (al * x + be) - 2 * b / (h * h * al * s)

    def V(self, x, raw):
        w = raw.omega
        y = x - 2 * raw.d / w
        return 0.25 * w * w * y * y

    def g(self, a, spec):
        al, be, b, h = spec.raw.alpha, spec.raw.beta, spec.derived.b, spec.raw.hbar
        s = a + b
        return -4 * b * b / (h**4 * al * al * s * s) + (al - be * be) * a * (a + 2 * b)

    def closed_energy(self, n, raw):
        # literal tabulated form; disagrees with the g-difference form (reported as TableMismatch)
        h, al, be, w, d = raw.hbar, raw.alpha, raw.beta, raw.omega, raw.d
        D = self.derive(raw).delta
        k = al - be * be
        bracket = (
            h**3 * al * k * (n + 1) * (2 * h * h * al * al * (n + 1) + w * w * (n + 2))
            + d * w * w * (be + h * al * d)
            + 0.25 * h * w**4
            + h * h * D * k * (n + 1) * (2 * h * h * al * al * (n + 1) + w * w)
        )
        return 4 * n * (D + (n + 1) * h * al) / ((D + h * al) * (D + h * al * (2 * n + 1))) ** 2 * bracket

    def _q(self, raw):
        return math.sqrt(raw.alpha - raw.beta**2)

    def to_u(self, x, raw):
        q = self._q(raw)
        return np.arctan((raw.alpha * np.asarray(x) + raw.beta) / q) / q

    def from_u(self, u, raw):
        q = self._q(raw)
        return (q * np.tan(q * np.asarray(u)) - raw.beta) / raw.alpha

    def u_domain(self, raw):
        q = self._q(raw)
        return Interval(-math.pi / (2 * q), math.pi / (2 * q))


class _SqrtDeformed(Family):
    """Shared pieces for the f = sqrt(1 + λ x²) families."""

    def domain(self, raw):
        if raw.lam > 0:
            return Interval(0.0, INF)
        return Interval(0.0, 1 / math.sqrt(-raw.lam))

    def f(self, x, raw):
        return ad.sqrt(1 + raw.lam * x * x)

    def to_u(self, x, raw):
        r = math.sqrt(abs(raw.lam))
        x = np.asarray(x, dtype=float)
        if raw.lam > 0:
            return np.arcsinh(r * x) / r
        return np.arcsin(np.clip(r * x, -1.0, 1.0)) / r

    def from_u(self, u, raw):
        r = math.sqrt(abs(raw.lam))
        u = np.asarray(u, dtype=float)
        if raw.lam > 0:
            return np.sinh(r * u) / r
        return np.sin(r * u) / r

    def u_domain(self, raw):
        if raw.lam > 0:
            return Interval(0.0, INF)
        return Interval(0.0, math.pi / (2 * math.sqrt(-raw.lam)))


class DeformedRadialOscillator(_SqrtDeformed):
    tag = "DRHO"
    params = ("omega", "l", "lam")

    def check(self, raw):
        _require(raw.lam != 0, "lam != 0")
        _require(raw.omega > 0, "omega > 0")
        _check_l(raw)

    def derive(self, raw):
        L, q = raw.l + 1, raw.omega / (2 * raw.lam)
        return DerivedParams(a=0.5 * (L - q), b=0.5 * (L + q))

    def W(self, x, a, spec):
        lam, b = spec.raw.lam, spec.derived.b
        f = self.f(x, spec.raw)
        return a * (-f / x - lam * x / f) + b * (-f / x + lam * x / f)

    def V(self, x, raw):
        w, lam, h, L = raw.omega, raw.lam, raw.hbar, raw.l + 1
        return w * (w + 2 * h * lam) * x * x / (4 * (1 + lam * x * x)) + L * (L - h) / (x * x)

    def g(self, a, spec):
        return -4 * spec.raw.lam * a * a

    def closed_energy(self, n, raw):
        h, w, lam, L = raw.hbar, raw.omega, raw.lam, raw.l + 1
        return 2 * n * h * w - 4 * h * lam * n * (L + h * n)


class DeformedCoulomb(_SqrtDeformed):
    tag = "DC"
    params = ("e2", "l", "lam")

    def check(self, raw):
        _require(raw.lam != 0, "lam != 0")
        _check_l(raw)

    def derive(self, raw):
        return DerivedParams(a=float(raw.l + 1))

    def W(self, x, a, spec):
        f = self.f(x, spec.raw)
        return -a * f / x + spec.raw.e2 / (2 * a)

    def V(self, x, raw):
        L, h = raw.l + 1, raw.hbar
        return -raw.e2 / x * self.f(x, raw) + L * (L - h) / (x * x)

    def g(self, a, spec):
        lam, e2 = spec.raw.lam, spec.raw.e2
        return -lam * a * a - e2 * e2 / (4 * a * a)

    def closed_energy(self, n, raw):
        h, lam, e2, L = raw.hbar, raw.lam, raw.e2, raw.l + 1
        return n * h * (2 * L + n * h) * (-lam + e2 * e2 / (4 * L * L * (L + n * h) ** 2))


class RationalDRHO(_SqrtDeformed):
    """m = 1 rational extension of the λ < 0 deformed radial oscillator."""

    tag = "DRHO_EXT1"
    params = ("omega", "l", "lam")
    hbar_explicit = True

    def check(self, raw):
        _require(raw.lam < 0, "lam < 0")
        _check_l(raw)
        _require(raw.omega > 2 * abs(raw.lam) * (raw.l + 1), "omega > 2|lam|(l+1)")

    def derive(self, raw):
        L, q = raw.l + 1, raw.omega / (2 * abs(raw.lam))
        return DerivedParams(a=0.5 * (L + q), b=0.5 * (L - q))

    @staticmethod
    def denominator(x, a, spec):
        """4 b f² + 2a - 2b, which is linear in a."""
        b, lam = spec.derived.b, abs(spec.raw.lam)
        return 4 * b * (1 - lam * x * x) + 2 * a - 2 * b

    def W(self, x, a, spec):
        b, lam, h = spec.derived.b, abs(spec.raw.lam), spec.raw.hbar
        f = self.f(x, spec.raw)
        D = self.denominator(x, a, spec)
        w0 = (a - b) * lam * x / f - (a + b) * f / x
        return w0 - 8 * h * b * lam * x * f * (1 / (D - h) - 1 / (D + h))

    def V(self, x, raw):
        w, lam, h, L = raw.omega, abs(raw.lam), raw.hbar, raw.l + 1
        q = (w - 2 * lam * L) * x * x + 2 * L - h
        return (
            w * (w - 2 * h * lam) * x * x / (4 * (1 - lam * x * x))
            + L * (L - h) / (x * x)
            + 4 * h * h * ((w + 2 * lam * (L - h)) / q - 2 * (2 * L - h) * (w - h * lam) / (q * q))
        )

    def W_printed(self, x, raw):
        """The superpotential in its (ω, l) form, for cross-checking :meth:`W`."""
        w, lam, h, L = raw.omega, abs(raw.lam), raw.hbar, raw.l + 1
        f = self.f(x, raw)
        c = w - 2 * L * lam
        return (
            w * x / (2 * f)
            - L / x * f
            + 2 * h * c * x * f * (1 / (c * x * x + 2 * L - h) - 1 / (c * x * x + 2 * L + h))
        )

    def g(self, a, spec):
        return 4 * a * a * abs(spec.raw.lam)

    def closed_energy(self, n, raw):
        h, w, lam, L = raw.hbar, raw.omega, abs(raw.lam), raw.l + 1
        return 4 * h * lam * n * (n * h + L + w / (2 * lam))


FAMILIES: dict[str, Family] = {
    fam.tag: fam
    for fam in (
        PoschlTeller(),
        RadialOscillator(),
        ScarfI(),
        Coulomb(),
        Morse(),
        Eckart(),
        RosenMorseI(),
        ShiftedOscillator(),
        DeformedRadialOscillator(),
        DeformedCoulomb(),
        RationalDRHO(),
    )
}
