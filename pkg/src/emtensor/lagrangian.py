"""Lagrangian models L(F_ab, g_ab) with exact partial derivatives.

Derivatives with respect to antisymmetric / symmetric tensor arguments use
the all-ordered-pairs convention: the derivative D^{ab} is defined through
``dL = D^{ab} dF_{ab}`` with the sum running over every index pair, so each
independent component is counted twice.  One convention, fixed here, used
everywhere.

Two derivative routes exist on purpose:

* ``method="exact"`` goes through the quadratic invariant s = F_ab F^ab with
  the profile derivatives obtained by dual seeding.  Fast, closed form.
* ``method="seeded"`` seeds every tensor component of the argument with a
  dual number and differentiates the raw evaluation (including a generic
  matrix inverse when the metric is the seeded argument), then projects onto
  the antisymmetric / symmetric part.  Slower, structure-blind, and therefore
  a genuinely independent route for the identity checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .scalars import (Dual, generic_inverse, profile_derivatives, sqrt,
                      value_of)

PAIR_COUNTING = "all-ordered-pairs"


def _maxwell_profile(s):
    return -0.25 * s


@dataclass(frozen=True)
class LagrangianModel:
    """Scalar map of (field strength, metric) built on the invariant
    s = F_ab F^ab through a profile function evaluable over generic scalars."""

    kind: str
    profile: object
    params: dict = field(default_factory=dict)

    def check_domain(self, s):
        if self.kind == "born-infeld":
            beta = self.params["beta"]
            arg = np.asarray(value_of(1.0 + s / (2.0 * beta * beta)))
            if np.any(arg <= 0.0):
                raise DomainError(
                    f"born-infeld domain violated: 1 + s/(2*beta^2) = {float(arg.min())} "
                    f"must be > 0 (beta = {beta})")

    def describe(self):
        if self.params:
            inner = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
            return f"{self.kind}({inner})"
        return self.kind


def make_model(kind, params=None):
    """Model factory for the kinds a scenario document may declare."""
    params = dict(params or {})
    if kind == "maxwell":
        return LagrangianModel("maxwell", _maxwell_profile, {})
    if kind == "born-infeld":
        beta = float(params.get("beta", 1.0))
        if beta <= 0:
            raise ConfigError(f"born-infeld beta must be positive, got {beta}")
        b2 = beta * beta

        def profile(s):
            return b2 * (1.0 - sqrt(1.0 + s / (2.0 * b2)))

        return LagrangianModel("born-infeld", profile, {"beta": beta})
    if kind == "power-series":
        coeffs = tuple(float(c) for c in params.get("coeffs", (-0.25,)))
        if not coeffs:
            raise ConfigError("power-series model needs at least one coefficient")

        def profile(s, _c=coeffs):
            total = 0.0
            p = s
            for c in _c:
                total = total + c * p
                p = p * s
            return total

        return LagrangianModel("power-series", profile, {"coeffs": coeffs})
    if kind == "composite":
        profile = params.pop("profile")
        return LagrangianModel("composite", profile, params)
    raise ConfigError(f"unknown Lagrangian kind {kind!r}")


MODEL_CATALOG_KINDS = (
    ("maxwell", {}),
    ("born-infeld", {"beta": 2.0}),
    ("power-series", {"coeffs": (-0.25, 0.05)}),
)


def catalog_models():
    """The three reference models every coincidence sweep runs against."""
    return [make_model(kind, params) for kind, params in MODEL_CATALOG_KINDS]


# -- invariant and chained derivatives ------------------------------------------

def invariant(F, ginv):
    Fup = ginv @ F @ ginv
    return float(np.einsum("ab,ab", F, Fup)), Fup


def evaluate(model, F, g):
    """L at a point; F and g are plain (n, n) arrays, F with lower indices."""
    ginv = np.linalg.inv(g)
    s, _ = invariant(F, ginv)
    model.check_domain(s)
    return float(value_of(model.profile(s)))


def dL_dF(model, F, g, method="exact"):
    """Antisymmetric (2,0) derivative of L with respect to F_ab."""
    ginv = np.linalg.inv(g)
    if method == "exact":
        s, Fup = invariant(F, ginv)
        model.check_domain(s)
        _, l1, _ = profile_derivatives(model.profile, s)
        return 2.0 * l1 * Fup
    if method == "seeded":
        raw = _seeded_wrt_F(model, F, ginv)
        return 0.5 * (raw - raw.T)
    raise ConfigError(f"unknown derivative method {method!r}")


def dL_dg(model, F, g, method="exact"):
    """Symmetric (2,0) derivative of L with respect to g_ab, F held fixed
    with lower indices."""
    if method == "exact":
        ginv = np.linalg.inv(g)
        s, Fup = invariant(F, ginv)
        model.check_domain(s)
        _, l1, _ = profile_derivatives(model.profile, s)
        Fmix = ginv @ F  # Fmix[a, c] = F^a_c
        return -2.0 * l1 * np.einsum("ac,bc->ab", Fup, Fmix)
    if method == "seeded":
        raw = _seeded_wrt_g(model, F, g)
        return 0.5 * (raw + raw.T)
    raise ConfigError(f"unknown derivative method {method!r}")


# -- componentwise dual seeding ---------------------------------------------

def _gmatmul(A, B, n):
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]


def _gtrace(A, n):
    total = A[0][0]
    for i in range(1, n):
        total = total + A[i][i]
    return total


def _generic_invariant(Fm, ginvm, n):
    # s = -tr(g^-1 F g^-1 F) for antisymmetric F
    M = _gmatmul(ginvm, Fm, n)
    return -_gtrace(_gmatmul(M, M, n), n)


def _seeded_wrt_F(model, F, ginv):
    """Raw dL/dF_ab with every component seeded independently (batched)."""
    n = F.shape[0]
    k = n * n
    eye = np.eye(k)
    Fm = [[Dual(np.full(k, F[a, b]), eye[a * n + b]) for b in range(n)]
          for a in range(n)]
    gm = [[float(ginv[a, b]) for b in range(n)] for a in range(n)]
    s = _generic_invariant(Fm, gm, n)
    model.check_domain(s)
    L = model.profile(s)
    if not isinstance(L, Dual):
        return np.zeros((n, n))
    return np.asarray(L.eps, dtype=float).reshape(n, n)


def _seeded_wrt_g(model, F, g):
    """Raw dL/dg_ab via batched seeds and a generic matrix inverse."""
    n = F.shape[0]
    k = n * n
    eye = np.eye(k)
    gmat = [[Dual(np.full(k, g[a, b]), eye[a * n + b]) for b in range(n)]
            for a in range(n)]
    Fm = [[float(F[a, b]) for b in range(n)] for a in range(n)]
    ginvm = generic_inverse(gmat)
    s = _generic_invariant(Fm, ginvm, n)
    model.check_domain(s)
    L = model.profile(s)
    if not isinstance(L, Dual):
        return np.zeros((n, n))
    return np.asarray(L.eps, dtype=float).reshape(n, n)


def dL_dg_directional(model, F, g, dFc, dgc):
    """(raw dL/dg_ab, its derivative along one coordinate direction), both by
    seeding: the outer dual level carries the direction, the inner level the
    component seeds.  Independent of the invariant chain rule."""
    n = F.shape[0]
    k = n * n
    eye = np.eye(k)
    zero = np.zeros(k)
    gmat = [[Dual(Dual(np.full(k, g[a, b]), eye[a * n + b]),
                  Dual(np.full(k, dgc[a, b]), zero))
             for b in range(n)] for a in range(n)]
    Fm = [[Dual(np.full(k, F[a, b]), np.full(k, dFc[a, b]))
           for b in range(n)] for a in range(n)]
    ginvm = generic_inverse(gmat)
    s = _generic_invariant(Fm, ginvm, n)
    model.check_domain(s)
    L = model.profile(s)
    if not isinstance(L, Dual):
        return np.zeros((n, n)), np.zeros((n, n))
    raw = np.asarray(value_of(L.val.eps), dtype=float).reshape(n, n)
    draw = np.asarray(value_of(L.eps.eps), dtype=float).reshape(n, n)
    return raw, draw


def seeded_sqrtdet_weighted_dg(model, F, g):
    """Raw derivative of sqrt|det g| * L with respect to g_ab (seeded).

    Used by the determinant-route cross-check of the metric stress tensor.
    """
    n = F.shape[0]
    k = n * n
    eye = np.eye(k)
    gmat = [[Dual(np.full(k, g[a, b]), eye[a * n + b]) for b in range(n)]
            for a in range(n)]
    Fm = [[float(F[a, b]) for b in range(n)] for a in range(n)]
    ginvm = generic_inverse(gmat)
    s = _generic_invariant(Fm, ginvm, n)
    model.check_domain(s)
    from .scalars import generic_abs, generic_det
    weighted = sqrt(generic_abs(generic_det(gmat))) * model.profile(s)
    if not isinstance(weighted, Dual):
        return np.zeros((n, n))
    return np.asarray(weighted.eps, dtype=float).reshape(n, n)


# -- pointwise bundle with coordinate derivatives -------------------------------

class ModelPointData:
    """Model quantities and their first coordinate derivatives at one point.

    Inputs are plain arrays: metric pieces plus the field strength and its
    coordinate derivative ``dF[c, a, b]``.  Everything here is the chain rule
    through the invariant; the seeded route above cross-checks it.
    """

    def __init__(self, model, g, ginv, dginv, F, dF=None):
        self.model = model
        n = g.shape[0]
        self.n = n
        self.F = F
        self.Fup = ginv @ F @ ginv
        self.Fmix = ginv @ F                      # Fmix[a, c] = F^a_c
        self.s = float(np.einsum("ab,ab", F, self.Fup))
        model.check_domain(self.s)
        L, l1, l2 = profile_derivatives(model.profile, self.s)
        self.L = L
        self.l1 = l1
        self.l2 = l2
        self.P = 2.0 * l1 * self.Fup              # dL/dF_ab, indices up
        self.G = -2.0 * l1 * np.einsum("ac,bc->ab", self.Fup, self.Fmix)
        if dF is None:
            return                                # value-only bundle
        self.dFup = (np.einsum("cae,ef,fb->cab", dginv, F, ginv)
                     + np.einsum("ae,cef,fb->cab", ginv, dF, ginv)
                     + np.einsum("ae,ef,cfb->cab", ginv, F, dginv))
        self.dFmix = (np.einsum("cae,eb->cab", dginv, F)
                      + np.einsum("ae,ceb->cab", ginv, dF))
        self.ds = (np.einsum("cab,ab->c", dF, self.Fup)
                   + np.einsum("ab,cab->c", F, self.dFup))
        self.dL = l1 * self.ds
        self.dP = (2.0 * l2 * np.einsum("c,ab->cab", self.ds, self.Fup)
                   + 2.0 * l1 * self.dFup)


# -- scalar field models --------------------------------------------------------

@dataclass(frozen=True)
class ScalarFieldModel:
    """First-order scalar-field Lagrangian L(d phi, g) built on the kinetic
    invariant u = g^ab d_a phi d_b phi."""

    kind: str
    profile: object

    def describe(self):
        return self.kind


def make_scalar_model(kind="massless-scalar"):
    if kind == "massless-scalar":
        return ScalarFieldModel(kind, lambda u: -0.5 * u)
    raise ConfigError(f"unknown scalar model kind {kind!r}")


def scalar_dL(model, v, g):
    """dL/d(d_a phi) as a (1,0) array; v holds the lowered gradient."""
    ginv = np.linalg.inv(g)
    u = float(v @ ginv @ v)
    _, l1, _ = profile_derivatives(model.profile, u)
    return 2.0 * l1 * (ginv @ v)


def scalar_dL_dg(model, v, g, method="exact"):
    ginv = np.linalg.inv(g)
    if method == "exact":
        u = float(v @ ginv @ v)
        _, l1, _ = profile_derivatives(model.profile, u)
        vup = ginv @ v
        return -l1 * np.outer(vup, vup)
    if method == "seeded":
        n = g.shape[0]
        k = n * n
        eye = np.eye(k)
        gmat = [[Dual(np.full(k, g[a, b]), eye[a * n + b]) for b in range(n)]
                for a in range(n)]
        ginvm = generic_inverse(gmat)
        u = sum(ginvm[a][b] * (v[a] * v[b]) for a in range(n) for b in range(n))
        L = model.profile(u)
        if not isinstance(L, Dual):
            return np.zeros((n, n))
        raw = np.asarray(L.eps, dtype=float).reshape(n, n)
        return 0.5 * (raw + raw.T)
    raise ConfigError(f"unknown derivative method {method!r}")


def scalar_evaluate(model, v, g):
    ginv = np.linalg.inv(g)
    u = float(v @ ginv @ v)
    return float(value_of(model.profile(u)))


class ScalarPointData:
    """Scalar-field analogue of ModelPointData; v = d phi, dv = dd phi."""

    def __init__(self, model, g, ginv, dginv, v, dv):
        self.model = model
        self.v = v
        self.vup = ginv @ v
        self.dvup = (np.einsum("cab,b->ca", dginv, v)
                     + np.einsum("ab,cb->ca", ginv, dv))
        self.u = float(v @ self.vup)
        self.du = (np.einsum("cab,a,b->c", dginv, v, v)
                   + 2.0 * np.einsum("ab,a,cb->c", ginv, v, dv))
        L, l1, l2 = profile_derivatives(model.profile, self.u)
        self.L = L
        self.l1 = l1
        self.l2 = l2
        self.dL = l1 * self.du
        self.P = 2.0 * l1 * self.vup              # dL/d(d_a phi), index up
        self.dP = (2.0 * l2 * np.einsum("c,a->ca", self.du, self.vup)
                   + 2.0 * l1 * self.dvup)
        self.G = -l1 * np.outer(self.vup, self.vup)
