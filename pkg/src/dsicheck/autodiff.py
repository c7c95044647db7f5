"""Truncated bivariate Taylor jets for exact partial derivatives in (x, a).

A :class:`Jet` carries the Taylor coefficients ``c[i, j]`` of a function
around a point, truncated at ``i <= px`` powers of the x-infinitesimal and
``j <= pa`` powers of the a-infinitesimal.  Arithmetic and the elementary
functions below propagate these coefficients exactly, so ``jet.d(i, j)``
is the partial derivative ``d^(i+j) / dx^i da^j`` to machine precision.

Coefficient arrays may carry trailing batch axes, which lets one jet hold
a whole sample of x points at once.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence, Union

import numpy as np

Number = Union[float, int, np.ndarray]


class Jet:
    __slots__ = ("c",)
    # make numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, coeffs: np.ndarray):
        self.c = np.asarray(coeffs, dtype=float)

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value: Number, px: int = 0, pa: int = 0) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((px + 1, pa + 1) + value.shape)
        c[0, 0] = value
        return cls(c)

    @classmethod
    def seed_x(cls, x: Number, px: int = 1, pa: int = 0) -> "Jet":
        jet = cls.constant(x, px, pa)
        if px >= 1:
            jet.c[1, 0] = 1.0
        return jet

    @classmethod
    def seed_a(cls, a: Number, px: int = 0, pa: int = 1, shape: Sequence[int] = ()) -> "Jet":
        value = np.broadcast_to(np.asarray(a, dtype=float), tuple(shape))
        jet = cls.constant(value, px, pa)
        if pa >= 1:
            jet.c[0, 1] = 1.0
        return jet

    # -- introspection ----------------------------------------------------

    @property
    def orders(self) -> tuple[int, int]:
        return self.c.shape[0] - 1, self.c.shape[1] - 1

    @property
    def value(self) -> np.ndarray | float:
        v = self.c[0, 0]
        return float(v) if np.ndim(v) == 0 else v

    def d(self, i: int = 0, j: int = 0) -> np.ndarray | float:
        """Partial derivative d^(i+j) / dx^i da^j."""
        px, pa = self.orders
        if i > px or j > pa:
            raise ValueError(f"derivative ({i}, {j}) exceeds jet orders ({px}, {pa})")
        v = self.c[i, j] * math.factorial(i) * math.factorial(j)
        return float(v) if np.ndim(v) == 0 else v

    def __repr__(self) -> str:
        return f"Jet(orders={self.orders}, value={self.value!r})"

    # -- arithmetic -------------------------------------------------------

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.orders != self.orders:
                raise ValueError(f"jet order mismatch {self.orders} vs {other.orders}")
            return other
        return Jet.constant(other, *self.orders)

    def __neg__(self) -> "Jet":
        return Jet(-self.c)

    def __pos__(self) -> "Jet":
        return self

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return Jet(self._lift(other).c + self.c)
        c = self.c.copy()
        c[0, 0] = c[0, 0] + np.asarray(other, dtype=float)
        return Jet(c)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.c * _expand(other, self.c.ndim))
        other = self._lift(other)
        return Jet(_truncated_product(self.c, other.c))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.c / _expand(other, self.c.ndim))
        return self * reciprocal(self._lift(other))

    def __rtruediv__(self, other) -> "Jet":
        return reciprocal(self) * other

    def __pow__(self, p) -> "Jet":
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(np.ones(np.shape(self.c[0, 0])), *self.orders)
            base = self
            n = int(p)
            while n:
                if n & 1:
                    out = out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        return power(self, float(p))


def _expand(v, ndim: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    # scalars/arrays broadcast against the batch axes, not the order axes
    return v.reshape((1, 1) + v.shape) if v.ndim else v


def _truncated_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    px, pa = a.shape[0] - 1, a.shape[1] - 1
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for i in range(px + 1):
        for j in range(pa + 1):
            aij = a[i, j]
            if not np.any(aij):
                continue
            out[i:, j:] += aij * b[: px + 1 - i, : pa + 1 - j]
    return out


def _compose(u: Jet, taylor: Callable[[np.ndarray, int], list]) -> Jet:
    """Evaluate g(u) given g's Taylor coefficients g^(k)(u0)/k! at the jet's value."""
    px, pa = u.orders
    kmax = px + pa
    u0 = u.c[0, 0]
    coeffs = taylor(u0, kmax)
    delta = Jet(u.c.copy())
    delta.c[0, 0] = 0.0
    out = Jet.constant(coeffs[0], px, pa)
    term = None
    for k in range(1, kmax + 1):
        term = delta if term is None else term * delta
        out = out + term * coeffs[k]
    return out


# -- elementary functions ---------------------------------------------------


def _exp_taylor(u0, kmax):
    e = np.exp(u0)
    return [e / math.factorial(k) for k in range(kmax + 1)]


def _log_taylor(u0, kmax):
    out = [np.log(u0)]
    for k in range(1, kmax + 1):
        out.append((-1.0) ** (k + 1) / (k * u0**k))
    return out


def _power_taylor(p):
    def taylor(u0, kmax):
        out = []
        binom = 1.0
        for k in range(kmax + 1):
            out.append(binom * u0 ** (p - k))
            binom *= (p - k) / (k + 1)
        return out

    return taylor


def _sin_taylor(u0, kmax):
    return [np.sin(u0 + k * math.pi / 2) / math.factorial(k) for k in range(kmax + 1)]


def _cos_taylor(u0, kmax):
    return [np.cos(u0 + k * math.pi / 2) / math.factorial(k) for k in range(kmax + 1)]


def _sinh_taylor(u0, kmax):
    s, c = np.sinh(u0), np.cosh(u0)
    return [(s if k % 2 == 0 else c) / math.factorial(k) for k in range(kmax + 1)]


def _cosh_taylor(u0, kmax):
    s, c = np.sinh(u0), np.cosh(u0)
    return [(c if k % 2 == 0 else s) / math.factorial(k) for k in range(kmax + 1)]


def power(u, p: float):
    if isinstance(u, Jet):
        return _compose(u, _power_taylor(p))
    return np.asarray(u, dtype=float) ** p


def reciprocal(u):
    return power(u, -1.0)


def sqrt(u):
    return power(u, 0.5)


def exp(u):
    return _compose(u, _exp_taylor) if isinstance(u, Jet) else np.exp(u)


def log(u):
    return _compose(u, _log_taylor) if isinstance(u, Jet) else np.log(u)


def sin(u):
    return _compose(u, _sin_taylor) if isinstance(u, Jet) else np.sin(u)


def cos(u):
    return _compose(u, _cos_taylor) if isinstance(u, Jet) else np.cos(u)


def sinh(u):
    return _compose(u, _sinh_taylor) if isinstance(u, Jet) else np.sinh(u)


def cosh(u):
    return _compose(u, _cosh_taylor) if isinstance(u, Jet) else np.cosh(u)


def tan(u):
    return sin(u) / cos(u)


def sec(u):
    return reciprocal(cos(u))


def csc(u):
    return reciprocal(sin(u))


def cot(u):
    return cos(u) / sin(u)


def coth(u):
    return cosh(u) / sinh(u)


def csch(u):
    return reciprocal(sinh(u))


def value_of(u) -> np.ndarray | float:
    return u.value if isinstance(u, Jet) else u
