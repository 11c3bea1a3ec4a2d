"""Differentiable scalars: nested dual numbers plus a finite-difference oracle.

Every closed-form field in the library is a map from coordinates to a scalar
that evaluates over *generic* scalar types.  Feeding plain floats gives the
value; feeding `Dual` seeds gives machine-precision first partials; nesting
two levels gives exact mixed second partials.  A central finite-difference
scheme provides an independent O(h^2) oracle for the same derivatives and is
the derivative engine of the "fd" evaluation mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, SingularMetricError


class Dual:
    """Scalar of the form ``val + eps*d`` with ``d**2 = 0``.

    Slots may hold floats, numpy arrays (for batched seeding) or further
    Duals; nesting one Dual inside another propagates exact mixed second
    partials through arbitrary arithmetic.
    """

    __slots__ = ("val", "eps")

    def __init__(self, val, eps):
        self.val = val
        self.eps = eps

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.eps + other.eps)
        return Dual(self.val + other, self.eps)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.eps - other.eps)
        return Dual(self.val - other, self.eps)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.eps)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val,
                        self.val * other.eps + self.eps * other.val)
        return Dual(self.val * other, self.eps * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            q = self.val / other.val
            return Dual(q, (self.eps - q * other.eps) / other.val)
        return Dual(self.val / other, self.eps / other)

    def __rtruediv__(self, other):
        q = other / self.val
        return Dual(q, -q * self.eps / self.val)

    def __neg__(self):
        return Dual(-self.val, -self.eps)

    def __pos__(self):
        return self

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(p * log(self))
        if p == 0:
            return Dual(self.val * 0 + 1.0, self.eps * 0)
        return Dual(self.val ** p, self.eps * (p * self.val ** (p - 1)))

    def __rpow__(self, base):
        return exp(self * log(base))

    def __repr__(self):
        return f"Dual({self.val!r}, {self.eps!r})"


def value_of(x):
    """Strip all derivative slots, returning the underlying value."""
    while isinstance(x, Dual):
        x = x.val
    return x


def _any_nonpositive(v):
    v = value_of(v)
    if isinstance(v, np.ndarray):
        return bool(np.any(v <= 0.0))
    return v <= 0.0


# -- generic elementary functions -------------------------------------------
# math.* on plain python floats (fast path), np.* otherwise.

def sin(x):
    if isinstance(x, Dual):
        return Dual(sin(x.val), cos(x.val) * x.eps)
    return math.sin(x) if isinstance(x, float) else np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(cos(x.val), -sin(x.val) * x.eps)
    return math.cos(x) if isinstance(x, float) else np.cos(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.val)
        return Dual(e, e * x.eps)
    return math.exp(x) if isinstance(x, float) else np.exp(x)


def sqrt(x):
    if _any_nonpositive(x):
        raise DomainError(f"sqrt requires a positive argument, got {value_of(x)!r}")
    if isinstance(x, Dual):
        r = sqrt(x.val)
        return Dual(r, x.eps / (2.0 * r))
    return math.sqrt(x) if isinstance(x, float) else np.sqrt(x)


def log(x):
    if _any_nonpositive(x):
        raise DomainError(f"log requires a positive argument, got {value_of(x)!r}")
    if isinstance(x, Dual):
        return Dual(log(x.val), x.eps / x.val)
    return math.log(x) if isinstance(x, float) else np.log(x)


def generic_abs(x):
    """|x| for generic scalars; smooth away from zero."""
    if _any_nonpositive(x):
        return -x
    return x


def generic_pow(a, b):
    """a**b where either argument may carry derivative slots."""
    if isinstance(b, Dual):
        return exp(b * log(a))
    if isinstance(a, Dual):
        return a ** b
    return a ** b


# -- dual seeding ------------------------------------------------------------

def _eps_of(r):
    return r.eps if isinstance(r, Dual) else 0.0


def seed_partial(f, x, direction):
    """Exact first partial of a smooth map at x, via a single dual seed."""
    n = len(x)
    if not 0 <= direction < n:
        raise ConfigError(f"direction {direction} out of range for dimension {n}")
    coords = tuple(Dual(float(x[i]), 1.0 if i == direction else 0.0)
                   for i in range(n))
    return float(value_of(_eps_of(f(coords))))


def seed_second(f, x, d1, d2):
    """Exact mixed second partial; canonical seed order makes it symmetric
    in (d1, d2) bit-for-bit."""
    n = len(x)
    if not (0 <= d1 < n and 0 <= d2 < n):
        raise ConfigError(f"directions ({d1},{d2}) out of range for dimension {n}")
    lo, hi = (d1, d2) if d1 <= d2 else (d2, d1)
    coords = tuple(
        Dual(Dual(float(x[i]), 1.0 if i == lo else 0.0),
             Dual(1.0 if i == hi else 0.0, 0.0))
        for i in range(n))
    return float(value_of(_eps_of(_eps_of(f(coords)))))


def seed_value(f, x):
    return float(value_of(f(tuple(float(xi) for xi in x))))


def profile_derivatives(profile, s):
    """(p(s), p'(s), p''(s)) of a one-argument generic map, by nested seeding."""
    r = profile(Dual(Dual(float(s), 1.0), Dual(1.0, 0.0)))
    val = float(value_of(r))
    if not isinstance(r, Dual):
        return val, 0.0, 0.0
    d1 = float(value_of(_eps_of(r.val)))
    d2 = float(value_of(_eps_of(_eps_of(r))))
    return val, d1, d2


# -- finite differences ------------------------------------------------------

@dataclass(frozen=True)
class FdScheme:
    """Central finite-difference scheme; only second order is supported."""

    h: float = 1e-4
    order: int = 2

    def __post_init__(self):
        if self.h <= 0:
            raise ConfigError(f"finite-difference step must be positive, got {self.h}")
        if self.order != 2:
            raise ConfigError(f"only the second-order central scheme exists, got order {self.order}")


def fd_partial(f, x, direction, scheme=FdScheme()):
    """(f(x + h e) - f(x - h e)) / 2h; exact on quadratics."""
    h = scheme.h
    xp = tuple(float(x[i]) + (h if i == direction else 0.0) for i in range(len(x)))
    xm = tuple(float(x[i]) - (h if i == direction else 0.0) for i in range(len(x)))
    return (seed_value(f, xp) - seed_value(f, xm)) / (2.0 * h)


def fd_second(f, x, d1, d2, scheme=FdScheme()):
    """Central second partial: 3-point on the diagonal, 4-point cross otherwise."""
    h = scheme.h
    x = tuple(float(xi) for xi in x)
    if d1 == d2:
        xp = tuple(xi + (h if i == d1 else 0.0) for i, xi in enumerate(x))
        xm = tuple(xi - (h if i == d1 else 0.0) for i, xi in enumerate(x))
        return (seed_value(f, xp) - 2.0 * seed_value(f, x) + seed_value(f, xm)) / (h * h)
    lo, hi = (d1, d2) if d1 < d2 else (d2, d1)

    def shifted(s1, s2):
        return tuple(xi + h * (s1 * (i == lo) + s2 * (i == hi)) for i, xi in enumerate(x))

    return (seed_value(f, shifted(+1, +1)) - seed_value(f, shifted(+1, -1))
            - seed_value(f, shifted(-1, +1)) + seed_value(f, shifted(-1, -1))) / (4.0 * h * h)


# -- derivative mode and jets -------------------------------------------------

@dataclass(frozen=True)
class DerivativeMode:
    """Selects the derivative engine for coordinate derivatives of fields."""

    kind: str = "dual"
    h: float = 1e-4

    def __post_init__(self):
        if self.kind not in ("dual", "fd"):
            raise ConfigError(f"derivative mode must be 'dual' or 'fd', got {self.kind!r}")
        if self.kind == "fd" and self.h <= 0:
            raise ConfigError(f"fd mode needs a positive step, got {self.h}")


DUAL = DerivativeMode("dual")


def fd_mode(h):
    return DerivativeMode("fd", h)


def jet1(f, x, mode=DUAL):
    """(value, gradient) of a smooth map at x."""
    n = len(x)
    val = seed_value(f, x)
    if mode.kind == "dual":
        grad = np.array([seed_partial(f, x, d) for d in range(n)])
    else:
        scheme = FdScheme(mode.h)
        grad = np.array([fd_partial(f, x, d, scheme) for d in range(n)])
    return val, grad


def jet2(f, x, mode=DUAL):
    """(value, gradient, hessian) of a smooth map at x.

    The hessian is filled from its upper triangle, so it is symmetric
    bit-for-bit in either mode.
    """
    n = len(x)
    val, grad = jet1(f, x, mode)
    hess = np.empty((n, n))
    if mode.kind == "dual":
        for a in range(n):
            for b in range(a, n):
                hess[a, b] = hess[b, a] = seed_second(f, x, a, b)
    else:
        scheme = FdScheme(mode.h)
        for a in range(n):
            for b in range(a, n):
                hess[a, b] = hess[b, a] = fd_second(f, x, a, b, scheme)
    return val, grad, hess


# -- generic dense linear algebra ---------------------------------------------
# Small matrices whose entries are generic scalars (floats, Duals, batched
# Duals).  Used when a metric carrying derivative seeds must be inverted.

def _pivot_magnitude(entry):
    v = value_of(entry)
    if isinstance(v, np.ndarray):
        v = v.flat[0]
    return abs(float(v))


def generic_inverse(mat):
    """Gauss-Jordan inverse of a list-of-lists of generic scalars."""
    n = len(mat)
    a = [list(row) for row in mat]
    inv = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: _pivot_magnitude(a[r][col]))
        if _pivot_magnitude(a[pivot_row][col]) < 1e-14:
            raise SingularMetricError("matrix is singular to working precision")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            inv[col], inv[pivot_row] = inv[pivot_row], inv[col]
        piv = a[col][col]
        a[col] = [e / piv for e in a[col]]
        inv[col] = [e / piv for e in inv[col]]
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col]
            if isinstance(factor, (int, float)) and factor == 0.0:
                continue
            a[r] = [e - factor * p for e, p in zip(a[r], a[col])]
            inv[r] = [e - factor * p for e, p in zip(inv[r], inv[col])]
    return inv


def generic_det(mat):
    """Determinant by Gaussian elimination over generic scalars."""
    n = len(mat)
    a = [list(row) for row in mat]
    det = 1.0
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: _pivot_magnitude(a[r][col]))
        if _pivot_magnitude(a[pivot_row][col]) < 1e-14:
            raise SingularMetricError("matrix is singular to working precision")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            det = -det
        piv = a[col][col]
        det = det * piv
        for r in range(col + 1, n):
            factor = a[r][col] / piv
            a[r] = [e - factor * p for e, p in zip(a[r], a[col])]
    return det
