"""Charts, metric fields, the Levi-Civita connection, curvature and Lie
derivatives.

Index conventions used throughout (all arrays are plain numpy at a point):

* ``dg[c, a, b]``        first coordinate derivative of ``g[a, b]``
* ``gamma[a, b, c]``     connection coefficients with the upper index first
* ``dgamma[e, a, b, c]`` coordinate derivative of ``gamma[a, b, c]``
* ``riem[b, d, a, c]``   curvature with the convention pinned by
                         ``commutator_residual``: the antisymmetrized second
                         covariant derivative of a vector V satisfies
                         ``(D_a D_c - D_c D_a) V^b = riem[b, d, a, c] V^d``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import ConfigError, DomainError, SingularMetricError
from .scalars import DUAL, jet1, jet2

RIEMANN_CONVENTION = "commutator: (D_a D_c - D_c D_a) V^b = R^b_{dac} V^d"


@dataclass(frozen=True)
class Chart:
    """A single coordinate patch: labels plus a rectangular domain."""

    names: tuple
    bounds: tuple  # ((lo, hi), ...) per coordinate

    def __post_init__(self):
        if len(self.names) < 2:
            raise ConfigError(f"charts need dimension >= 2, got {len(self.names)}")
        if len(self.bounds) != len(self.names):
            raise ConfigError("one (lo, hi) bound pair per coordinate is required")
        for name, (lo, hi) in zip(self.names, self.bounds):
            if not lo < hi:
                raise ConfigError(f"empty bound for coordinate {name!r}: [{lo}, {hi}]")

    @property
    def dim(self):
        return len(self.names)

    def contains(self, x):
        return all(lo <= xi <= hi for xi, (lo, hi) in zip(x, self.bounds))

    def require(self, x):
        for name, xi, (lo, hi) in zip(self.names, x, self.bounds):
            if not lo <= xi <= hi:
                raise DomainError(
                    f"coordinate {name}={xi} outside chart domain [{lo}, {hi}]")

    def sample_points(self, count, seed):
        """Seeded quasi-random interior points, kept away from the boundary so
        that finite-difference stencils stay inside the chart."""
        sampler = qmc.Halton(d=self.dim, scramble=True, seed=seed)
        u = sampler.random(count)
        points = np.empty_like(u)
        for i, (lo, hi) in enumerate(self.bounds):
            width = hi - lo
            margin = min(max(0.05 * width, 0.011), 0.25 * width)
            points[:, i] = lo + margin + u[:, i] * (width - 2.0 * margin)
        return points


class _ZeroMap:
    def __call__(self, coords):
        return 0.0

    def __repr__(self):
        return "ExprMap('0')"


ZERO_MAP = _ZeroMap()


@dataclass(frozen=True)
class MetricField:
    """Symmetric (0,2) metric; components stored on the upper triangle only,
    so pointwise symmetry is exact by construction."""

    chart: Chart
    components: dict  # {(a, b) with a <= b: smooth map}
    signature: tuple

    def __post_init__(self):
        n = self.chart.dim
        for (a, b) in self.components:
            if not (0 <= a <= b < n):
                raise ConfigError(f"metric component key ({a},{b}) must satisfy 0 <= a <= b < {n}")
        if len(self.signature) != n:
            raise ConfigError("signature must list one sign per dimension")

    def _map(self, a, b):
        key = (a, b) if a <= b else (b, a)
        return self.components.get(key, ZERO_MAP)

    def value(self, x):
        n = self.chart.dim
        g = np.empty((n, n))
        for a in range(n):
            for b in range(a, n):
                g[a, b] = g[b, a] = float(self._map(a, b)(tuple(x)))
        return g

    def jets(self, x, mode=DUAL):
        """(g, dg, ddg) with dg[c,a,b] and ddg[c,d,a,b]."""
        n = self.chart.dim
        g = np.empty((n, n))
        dg = np.empty((n, n, n))
        ddg = np.empty((n, n, n, n))
        for a in range(n):
            for b in range(a, n):
                val, grad, hess = jet2(self._map(a, b), x, mode)
                g[a, b] = g[b, a] = val
                dg[:, a, b] = dg[:, b, a] = grad
                ddg[:, :, a, b] = ddg[:, :, b, a] = hess
        return g, dg, ddg


@dataclass(frozen=True)
class VectorField:
    """Contravariant vector field with one smooth map per component."""

    chart: Chart
    components: tuple
    kind: str = "arbitrary"  # arbitrary | killing | constant
    name: str = ""

    def __post_init__(self):
        if len(self.components) != self.chart.dim:
            raise ConfigError("vector field needs one component per dimension")
        if self.kind not in ("arbitrary", "killing", "constant"):
            raise ConfigError(f"unknown vector field kind {self.kind!r}")

    def value(self, x):
        return np.array([float(c(tuple(x))) for c in self.components])

    def jets(self, x, mode=DUAL):
        """(xi, dxi) with dxi[c, a] the derivative of component a."""
        n = self.chart.dim
        xi = np.empty(n)
        dxi = np.empty((n, n))
        for a, comp in enumerate(self.components):
            val, grad = jet1(comp, x, mode)
            xi[a] = val
            dxi[:, a] = grad
        return xi, dxi


@dataclass(frozen=True)
class TensorField:
    """General tensor field for the covariant-derivative operation.

    ``index_kinds`` holds 'u' or 'd' per slot; ``components`` is an object
    array of smooth maps with one axis per slot.
    """

    chart: Chart
    components: np.ndarray
    index_kinds: tuple

    def __post_init__(self):
        if self.components.shape != (self.chart.dim,) * len(self.index_kinds):
            raise ConfigError("component array shape must match rank and dimension")

    def values(self, x):
        out = np.empty(self.components.shape)
        for idx in np.ndindex(*self.components.shape):
            out[idx] = float(self.components[idx](tuple(x)))
        return out

    def jets(self, x, mode=DUAL):
        n = self.chart.dim
        vals = np.empty(self.components.shape)
        grads = np.empty((n,) + self.components.shape)
        for idx in np.ndindex(*self.components.shape):
            val, grad = jet1(self.components[idx], x, mode)
            vals[idx] = val
            grads[(slice(None),) + idx] = grad
        return vals, grads


@dataclass(frozen=True)
class Connection:
    """Levi-Civita coefficients at a point, upper index first."""

    gamma: np.ndarray
    point: tuple


@dataclass(frozen=True)
class RiemannValue:
    components: np.ndarray  # riem[b, d, a, c]
    convention: str
    point: tuple


class GeometryFrame:
    """All metric-derived quantities at a single point, computed lazily and
    shared between checks.  Everything downstream of the metric jets is plain
    numpy assembly, so the derivative engine is swappable via ``mode``."""

    def __init__(self, metric, x, mode=DUAL):
        metric.chart.require(x)
        self.metric = metric
        self.x = tuple(float(xi) for xi in x)
        self.mode = mode
        self.n = metric.chart.dim

    @functools.cached_property
    def _gjets(self):
        return self.metric.jets(self.x, self.mode)

    @property
    def g(self):
        return self._gjets[0]

    @property
    def dg(self):
        return self._gjets[1]

    @property
    def ddg(self):
        return self._gjets[2]

    @functools.cached_property
    def ginv(self):
        g = self.g
        cond = np.linalg.cond(g)
        if not np.isfinite(cond) or cond > 1e12:
            raise SingularMetricError(
                f"metric at {self.x} is numerically singular", condition=cond)
        return np.linalg.inv(g)

    @functools.cached_property
    def dginv(self):
        # d(g^-1) = -g^-1 dg g^-1, one slab per derivative direction
        return -np.einsum("ae,cef,fb->cab", self.ginv, self.dg, self.ginv)

    @functools.cached_property
    def ddginv(self):
        ginv, dg, ddg, dginv = self.ginv, self.dg, self.ddg, self.dginv
        term1 = np.einsum("dae,cef,fb->cdab", dginv, dg, ginv)
        term2 = np.einsum("ae,cdef,fb->cdab", ginv, ddg, ginv)
        term3 = np.einsum("ae,cef,dfb->cdab", ginv, dg, dginv)
        return -(term1 + term2 + term3)

    @functools.cached_property
    def sqrt_det(self):
        det = np.linalg.det(self.g)
        if det == 0.0:
            raise SingularMetricError(f"metric determinant vanished at {self.x}")
        return float(np.sqrt(abs(det)))

    @functools.cached_property
    def dsqrt_det(self):
        # d sqrt|det g| = (1/2) sqrt|det g| tr(g^-1 dg)
        return 0.5 * self.sqrt_det * np.einsum("ab,cab->c", self.ginv, self.dg)

    @functools.cached_property
    def _gamma_lowered(self):
        # lowered[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
        return (self.dg.transpose(1, 0, 2) + self.dg.transpose(1, 2, 0)
                - self.dg)

    @functools.cached_property
    def gamma(self):
        return 0.5 * np.einsum("ad,dbc->abc", self.ginv, self._gamma_lowered)

    @functools.cached_property
    def dgamma(self):
        # dlow[e, d, b, c] = d_e lowered[d, b, c]
        dlow = (self.ddg.transpose(0, 2, 1, 3) + self.ddg.transpose(0, 2, 3, 1)
                - self.ddg)
        return 0.5 * (np.einsum("ead,dbc->eabc", self.dginv, self._gamma_lowered)
                      + np.einsum("ad,edbc->eabc", self.ginv, dlow))

    @functools.cached_property
    def riemann(self):
        # riem[b, d, a, c] = d_a Gamma^b_cd - d_c Gamma^b_ad + GG - GG
        gamma, dgamma = self.gamma, self.dgamma
        riem = (dgamma.transpose(1, 3, 0, 2) - dgamma.transpose(1, 3, 2, 0)
                + np.einsum("bae,ecd->bdac", gamma, gamma)
                - np.einsum("bce,ead->bdac", gamma, gamma))
        return riem

    @functools.cached_property
    def ricci(self):
        return np.einsum("bdbc->dc", self.riemann)

    @functools.cached_property
    def ricci_scalar(self):
        return float(np.einsum("dc,dc", self.ginv, self.ricci))

    def lower(self, v):
        return self.g @ v

    def raise_(self, v):
        return self.ginv @ v


# -- module-level operations ----------------------------------------------------

def christoffel(metric, x, mode=DUAL):
    """Levi-Civita coefficients from exact metric partials."""
    frame = GeometryFrame(metric, x, mode)
    return Connection(gamma=frame.gamma, point=frame.x)


def riemann(metric, x, mode=DUAL):
    frame = GeometryFrame(metric, x, mode)
    return RiemannValue(components=frame.riemann,
                        convention=RIEMANN_CONVENTION, point=frame.x)


def covariant_derivative(tensor_field, metric, x, mode=DUAL):
    """One covariant derivative of a tensor field; the new lower index comes
    first in the returned array."""
    frame = GeometryFrame(metric, x, mode)
    vals, grads = tensor_field.jets(x, mode)
    gamma = frame.gamma
    result = grads.copy()
    rank = len(tensor_field.index_kinds)
    for pos, kind in enumerate(tensor_field.index_kinds):
        moved = np.moveaxis(vals, pos, 0)  # contracted slot first
        if kind == "u":
            corr = np.tensordot(gamma, moved, axes=(2, 0))  # [a, c, ...rest]
            corr = np.moveaxis(corr.swapaxes(0, 1), 1, pos + 1)
            result = result + corr
        else:
            corr = np.tensordot(gamma, moved, axes=(0, 0))  # [c, b, ...rest]
            corr = np.moveaxis(corr, 1, pos + 1)
            result = result - corr
    del rank
    return result


def gradient(scalar_map, x, mode=DUAL):
    """Covariant derivative of a scalar: its coordinate partials."""
    _, grad = jet1(scalar_map, x, mode)
    return grad


def lie_derivative_02(matrix_field, xi, x, mode=DUAL, metric=None):
    """Lie derivative of a (0,2) tensor along xi.

    With ``metric=None`` plain partials are used; with a metric the covariant
    form is used instead.  Both agree for a torsion-free connection and the
    agreement is one of the library's property checks.
    """
    n = len(x)
    fvals = np.empty((n, n))
    fgrads = np.empty((n, n, n))
    for a in range(n):
        for b in range(n):
            val, grad = jet1(matrix_field[a][b], x, mode)
            fvals[a, b] = val
            fgrads[:, a, b] = grad
    xivals, dxi = xi.jets(x, mode)
    if metric is not None:
        frame = GeometryFrame(metric, x, mode)
        gamma = frame.gamma
        dF = (fgrads
              - np.einsum("dca,db->cab", gamma, fvals)
              - np.einsum("dcb,ad->cab", gamma, fvals))
        dXi = dxi + np.einsum("ace,e->ca", gamma, xivals)
    else:
        dF = fgrads
        dXi = dxi
    return (np.einsum("c,cab->ab", xivals, dF)
            + np.einsum("ac,cb->ab", dXi, fvals)
            + np.einsum("bc,ac->ab", dXi, fvals))


def killing_residual(metric, xi, x, mode=DUAL):
    """D_a xi_b + D_b xi_a; zero iff xi generates an isometry."""
    frame = GeometryFrame(metric, x, mode)
    xivals, dxi = xi.jets(x, mode)
    xi_low = frame.g @ xivals
    dxi_low = (np.einsum("abc,c->ab", frame.dg, xivals)
               + np.einsum("bc,ac->ab", frame.g, dxi))
    cd = dxi_low - np.einsum("cab,c->ab", frame.gamma, xi_low)
    return cd + cd.T


def covariant_constant_residual(metric, xi, x, mode=DUAL):
    """Max |D_a xi^b|; zero only for parallel vector fields."""
    frame = GeometryFrame(metric, x, mode)
    xivals, dxi = xi.jets(x, mode)
    cd = dxi + np.einsum("bac,c->ab", frame.gamma, xivals)
    return float(np.max(np.abs(cd)))


def commutator_residual(metric, oneform_components, x, mode=DUAL):
    """Residual of (D_a D_c - D_c D_a) V^b = R^b_{dac} V^d for the raised
    one-form.  This check is what pins the curvature sign convention."""
    frame = GeometryFrame(metric, x, mode)
    n = frame.n
    A = np.empty(n)
    dA = np.empty((n, n))
    ddA = np.empty((n, n, n))
    for b, comp in enumerate(oneform_components):
        val, grad, hess = jet2(comp, x, mode)
        A[b] = val
        dA[:, b] = grad
        ddA[:, :, b] = hess
    ginv, dginv, ddginv = frame.ginv, frame.dginv, frame.ddginv
    V = ginv @ A
    dV = np.einsum("cbe,e->cb", dginv, A) + np.einsum("be,ce->cb", ginv, dA)
    ddV = (np.einsum("acbe,e->acb", ddginv, A)
           + np.einsum("abe,ce->acb", dginv, dA)
           + np.einsum("cbe,ae->acb", dginv, dA)
           + np.einsum("be,ace->acb", ginv, ddA))
    gamma, dgamma = frame.gamma, frame.dgamma
    W = dV + np.einsum("bce,e->cb", gamma, V)           # W[c,b] = D_c V^b
    dW = (ddV + np.einsum("abce,e->acb", dgamma, V)
          + np.einsum("bce,ae->acb", gamma, dV))
    S = (dW + np.einsum("bae,ce->acb", gamma, W)
         - np.einsum("eac,eb->acb", gamma, W))          # S[a,c,b] = D_a D_c V^b
    lhs = S - S.transpose(1, 0, 2)
    rhs = np.einsum("bdac,d->acb", frame.riemann, V)
    return float(np.max(np.abs(lhs - rhs)))


def first_bianchi_residual(riem):
    """Cyclic sum over the last three slots of the curvature array."""
    cyc = riem + riem.transpose(0, 2, 3, 1) + riem.transpose(0, 3, 1, 2)
    return float(np.max(np.abs(cyc)))


def metric_compatibility_residual(metric, x, mode=DUAL):
    frame = GeometryFrame(metric, x, mode)
    cd = (frame.dg
          - np.einsum("dca,db->cab", frame.gamma, frame.g)
          - np.einsum("dcb,ad->cab", frame.gamma, frame.g))
    return float(np.max(np.abs(cd)))
