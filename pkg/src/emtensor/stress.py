"""Energy-momentum tensors and Noether currents.

Three constructions of the (2,0) stress tensor live here:

* canonical      -2 (dL/dF_ac) F^b_c + g^ab L
* metric          2 (dL/dg_ab) + g^ab L, with the metric derivative taken
                  through the *seeded* route so that equality with the
                  canonical tensor is a two-route numerical check rather
                  than an arithmetic triviality
* traditional    -(dL/d(D_a A_c)) D^b A_c + g^ab L, the textbook object,
                  with dL/d(D_a A_c) extended off the antisymmetric subspace
                  as 2 dL/dF_ac

plus the scalar-field analogue.  ``GaugeFrame`` / ``ScalarFrame`` bundle all
pointwise quantities and their first coordinate derivatives so divergences
and currents are cheap numpy assembly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryFrame
from .lagrangian import (ModelPointData, ScalarPointData, dL_dg,
                         scalar_dL_dg)
from .scalars import DUAL, jet2


@dataclass(frozen=True)
class StressResult:
    """A (2,0) stress tensor value at a point."""

    components: np.ndarray
    variant: str  # canonical | metric | traditional | scalar-canonical | scalar-metric
    point: tuple


@dataclass(frozen=True)
class NoetherCurrent:
    components: np.ndarray
    generator: str
    point: tuple


class GaugeFrame:
    """Everything needed at one point of a gauge-field scenario."""

    def __init__(self, metric, potential, x, mode=DUAL):
        self.geo = GeometryFrame(metric, x, mode)
        self.potential = potential
        self.x = self.geo.x
        self.mode = mode
        self.n = self.geo.n
        self._model_data = {}
        self._model_values = {}

    @functools.cached_property
    def _jets1(self):
        return self.potential.jets(self.x, self.mode, order=1)

    @functools.cached_property
    def _jets2(self):
        return self.potential.jets(self.x, self.mode, order=2)

    @property
    def A(self):
        return self._jets1[0]

    @property
    def dA(self):
        return self._jets1[1]

    @property
    def ddA(self):
        return self._jets2[2]

    @functools.cached_property
    def A_up(self):
        return self.geo.ginv @ self.A

    @functools.cached_property
    def F(self):
        dA = self.dA
        return dA - dA.T

    @functools.cached_property
    def dF(self):
        ddA = self.ddA
        return ddA - ddA.transpose(0, 2, 1)

    @functools.cached_property
    def cdA(self):
        """cdA[e, c] = D_e A_c."""
        return self.dA - np.einsum("fec,f->ec", self.geo.gamma, self.A)

    @functools.cached_property
    def cdA_up(self):
        """cdA_up[b, c] = D^b A_c."""
        return self.geo.ginv @ self.cdA

    @functools.cached_property
    def dcdA_up(self):
        geo = self.geo
        dcdA = (self.ddA
                - np.einsum("dfec,f->dec", geo.dgamma, self.A)
                - np.einsum("fec,df->dec", geo.gamma, self.dA))
        return (np.einsum("dbe,ec->dbc", geo.dginv, self.cdA)
                + np.einsum("be,dec->dbc", geo.ginv, dcdA))

    def model_data(self, model, with_derivatives=True):
        key = (id(model), with_derivatives)
        if key not in self._model_data:
            geo = self.geo
            dF = self.dF if with_derivatives else None
            self._model_data[key] = ModelPointData(
                model, geo.g, geo.ginv, geo.dginv, self.F, dF)
        return self._model_data[key]

    # -- tensors ------------------------------------------------------------

    def canonical(self, model, with_derivatives=True):
        d = self.model_data(model, with_derivatives)
        return (-2.0 * np.einsum("ac,bc->ab", d.P, d.Fmix)
                + d.L * self.geo.ginv)

    def dcanonical(self, model):
        d = self.model_data(model)
        geo = self.geo
        return (-2.0 * (np.einsum("eac,bc->eab", d.dP, d.Fmix)
                        + np.einsum("ac,ebc->eab", d.P, d.dFmix))
                + np.einsum("e,ab->eab", d.dL, geo.ginv)
                + d.L * geo.dginv)

    def metric_chain(self, model, with_derivatives=True):
        d = self.model_data(model, with_derivatives)
        return 2.0 * d.G + d.L * self.geo.ginv

    def metric_seeded(self, model):
        d = self.model_data(model, with_derivatives=False)
        G = dL_dg(model, self.F, self.geo.g, method="seeded")
        return 2.0 * G + d.L * self.geo.ginv

    def traditional(self, model, with_derivatives=True):
        d = self.model_data(model, with_derivatives)
        return (-2.0 * np.einsum("ac,bc->ab", d.P, self.cdA_up)
                + d.L * self.geo.ginv)

    def dtraditional(self, model):
        d = self.model_data(model)
        geo = self.geo
        return (-2.0 * (np.einsum("eac,bc->eab", d.dP, self.cdA_up)
                        + np.einsum("ac,ebc->eab", d.P, self.dcdA_up))
                + np.einsum("e,ab->eab", d.dL, geo.ginv)
                + d.L * geo.dginv)

    # -- divergences and currents --------------------------------------------

    def divergence(self, T, dT):
        gamma = self.geo.gamma
        return (np.einsum("aab->b", dT)
                + np.einsum("aae,eb->b", gamma, T)
                + np.einsum("bae,ae->b", gamma, T))

    def divergence_cross_form(self, T, dT):
        """d_a(sqrt|g| T^ab)/sqrt|g| + T^ac Gamma^b_ca; must agree with
        ``divergence`` on symmetric tensors."""
        geo = self.geo
        return ((np.einsum("a,ab->b", geo.dsqrt_det, T)
                 + geo.sqrt_det * np.einsum("aab->b", dT)) / geo.sqrt_det
                + np.einsum("ac,bca->b", T, geo.gamma))

    def field_equation(self, model):
        d = self.model_data(model)
        gamma = self.geo.gamma
        return (np.einsum("aab->b", d.dP)
                + np.einsum("aae,eb->b", gamma, d.P)
                + np.einsum("bae,ae->b", gamma, d.P))

    def obstruction_term(self, model):
        """(dL/dF_ac) R^b_dac A^d; the curvature source of the traditional
        tensor's divergence."""
        d = self.model_data(model, with_derivatives=False)
        return np.einsum("ac,bdac,d->b", d.P, self.geo.riemann, self.A_up)

    def xi_data(self, xi):
        """(xi, dxi, xi_low, dxi_low, cd_xi_low) for a vector field."""
        geo = self.geo
        xivals, dxi = xi.jets(self.x, self.mode)
        xi_low = geo.g @ xivals
        dxi_low = (np.einsum("abc,c->ab", geo.dg, xivals)
                   + np.einsum("bc,ac->ab", geo.g, dxi))
        cd_xi_low = dxi_low - np.einsum("cab,c->ab", geo.gamma, xi_low)
        return xivals, dxi, xi_low, dxi_low, cd_xi_low

    def current_divergence(self, T, dT, xi):
        """D_a (T^ab xi_b) plus the pieces needed for reporting scales."""
        _, _, xi_low, dxi_low, _ = self.xi_data(xi)
        j = T @ xi_low
        dj = (np.einsum("aab,b->a", dT, xi_low)
              + np.einsum("ab,ab->a", T, dxi_low))
        div = float(dj.sum() + np.einsum("aac,c", self.geo.gamma, j))
        return div, j

    def lie_metric(self, xi):
        _, _, _, _, cd = self.xi_data(xi)
        return cd + cd.T


class ScalarFrame:
    """Pointwise bundle for scalar-field scenarios; phi plays the role of the
    potential and d(phi) that of the field strength."""

    def __init__(self, metric, phi, model, x, mode=DUAL):
        self.geo = GeometryFrame(metric, x, mode)
        self.phi = phi
        self.model = model
        self.x = self.geo.x
        self.mode = mode
        self.n = self.geo.n

    @functools.cached_property
    def _jets(self):
        return jet2(self.phi, self.x, self.mode)

    @property
    def v(self):
        return self._jets[1]

    @property
    def dv(self):
        return self._jets[2]

    @functools.cached_property
    def data(self):
        geo = self.geo
        return ScalarPointData(self.model, geo.g, geo.ginv, geo.dginv,
                               self.v, self.dv)

    def canonical(self):
        d = self.data
        return -np.outer(d.P, d.vup) + d.L * self.geo.ginv

    def dcanonical(self):
        d = self.data
        geo = self.geo
        return (-(np.einsum("ea,b->eab", d.dP, d.vup)
                  + np.einsum("a,eb->eab", d.P, d.dvup))
                + np.einsum("e,ab->eab", d.dL, geo.ginv)
                + d.L * geo.dginv)

    def metric_chain(self):
        d = self.data
        return 2.0 * d.G + d.L * self.geo.ginv

    def metric_seeded(self):
        d = self.data
        G = scalar_dL_dg(self.model, self.v, self.geo.g, method="seeded")
        return 2.0 * G + d.L * self.geo.ginv

    def field_equation(self):
        d = self.data
        gamma = self.geo.gamma
        return float(np.einsum("aa->", d.dP)
                     + np.einsum("aac,c->", gamma, d.P))

    divergence = GaugeFrame.divergence
    divergence_cross_form = GaugeFrame.divergence_cross_form
    xi_data = GaugeFrame.xi_data
    current_divergence = GaugeFrame.current_divergence
    lie_metric = GaugeFrame.lie_metric


# -- public single-point operations ----------------------------------------------

def canonical_tensor(model, potential, metric, x, mode=DUAL):
    frame = GaugeFrame(metric, potential, x, mode)
    return StressResult(frame.canonical(model, with_derivatives=False),
                        "canonical", frame.x)


def metric_tensor(model, potential, metric, x, mode=DUAL):
    frame = GaugeFrame(metric, potential, x, mode)
    return StressResult(frame.metric_seeded(model), "metric", frame.x)


def traditional_tensor(model, potential, metric, x, mode=DUAL):
    frame = GaugeFrame(metric, potential, x, mode)
    return StressResult(frame.traditional(model, with_derivatives=False),
                        "traditional", frame.x)


def scalar_canonical_tensor(model, phi, metric, x, mode=DUAL):
    frame = ScalarFrame(metric, phi, model, x, mode)
    return StressResult(frame.canonical(), "scalar-canonical", frame.x)


def noether_current(stress, xi, metric, x, mode=DUAL):
    """j^a = T^ab xi_b with the index lowered by the local metric."""
    geo = GeometryFrame(metric, x, mode)
    xivals = xi.value(x)
    j = stress.components @ (geo.g @ xivals)
    return NoetherCurrent(j, generator=xi.name or xi.kind, point=geo.x)
