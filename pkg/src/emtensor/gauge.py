"""Gauge potential, field strength, the cyclic derivative identity and the
field-equation residual.

The potential is the primary object; the field strength is always derived
from it so gauge transformations can be exercised explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import GeometryFrame
from .lagrangian import ModelPointData
from .scalars import DUAL, jet1, jet2


@dataclass(frozen=True)
class GaugePotential:
    """One-form field A_b with one smooth map per component."""

    chart: object
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.chart.dim:
            raise ConfigError("potential needs one component per dimension")

    def values(self, x):
        return np.array([float(c(tuple(x))) for c in self.components])

    def jets(self, x, mode=DUAL, order=2):
        """(A, dA) for order 1, (A, dA, ddA) for order 2, with
        dA[c, b] = d_c A_b and ddA[c, d, b] = d_c d_d A_b."""
        n = self.chart.dim
        A = np.empty(n)
        dA = np.empty((n, n))
        if order == 1:
            for b, comp in enumerate(self.components):
                val, grad = jet1(comp, x, mode)
                A[b] = val
                dA[:, b] = grad
            return A, dA
        ddA = np.empty((n, n, n))
        for b, comp in enumerate(self.components):
            val, grad, hess = jet2(comp, x, mode)
            A[b] = val
            dA[:, b] = grad
            ddA[:, :, b] = hess
        return A, dA, ddA


@dataclass(frozen=True)
class ShiftedPotential:
    """A + d(chi).  First-order jets only: the shifted second derivatives
    would need third derivatives of chi, which the substrate does not carry."""

    base: GaugePotential
    chi: object  # smooth map

    @property
    def chart(self):
        return self.base.chart

    def values(self, x):
        A, _ = self.jets(x, order=1)
        return A

    def jets(self, x, mode=DUAL, order=1):
        if order != 1:
            raise DomainError(
                "gauge-shifted potentials expose first-order jets only "
                "(second derivatives would need third derivatives of the gauge function)")
        A, dA = self.base.jets(x, mode, order=1)
        _, chi_grad, chi_hess = jet2(self.chi, x, mode)
        return A + chi_grad, dA + chi_hess


def gauge_shift(potential, chi):
    """A -> A + d(chi); leaves the field strength untouched."""
    return ShiftedPotential(base=potential, chi=chi)


@dataclass(frozen=True)
class FieldStrength:
    """Antisymmetric (0,2) value, stored on the strict upper triangle."""

    dim: int
    upper: dict  # {(a, b) with a < b: value}

    @property
    def matrix(self):
        F = np.zeros((self.dim, self.dim))
        for (a, b), v in self.upper.items():
            F[a, b] = v
            F[b, a] = -v
        return F

    @classmethod
    def from_matrix(cls, F):
        n = F.shape[0]
        return cls(dim=n, upper={(a, b): float(F[a, b])
                                 for a in range(n) for b in range(a + 1, n)})


def field_strength(potential, x, mode=DUAL):
    """F_ab = d_a A_b - d_b A_a from exact partials of the potential."""
    _, dA = potential.jets(x, mode, order=1)
    return FieldStrength.from_matrix(dA - dA.T)


def field_strength_jets(potential, x, mode=DUAL):
    """(F, dF) with dF[c, a, b] = d_c F_ab; needs second-order jets."""
    _, dA, ddA = potential.jets(x, mode, order=2)
    F = dA - dA.T
    dF = ddA - ddA.transpose(0, 2, 1)
    return F, dF


def covariant_field_strength(potential, metric, x, mode=DUAL):
    """Antisymmetrized covariant derivative of A; equals the plain exterior
    derivative for a torsion-free connection (property-tested)."""
    frame = GeometryFrame(metric, x, mode)
    A, dA = potential.jets(x, mode, order=1)
    cd = dA - np.einsum("cab,c->ab", frame.gamma, A)
    return cd - cd.T


def bianchi_residual(potential, metric, x, mode=DUAL):
    """max |D_a F_bc + D_b F_ca + D_c F_ab| over all index triples."""
    frame = GeometryFrame(metric, x, mode)
    F, dF = field_strength_jets(potential, x, mode)
    gamma = frame.gamma
    cdF = (dF
           - np.einsum("dca,db->cab", gamma, F)
           - np.einsum("dcb,ad->cab", gamma, F))
    cyc = cdF + cdF.transpose(1, 2, 0) + cdF.transpose(2, 0, 1)
    return float(np.max(np.abs(cyc)))


def field_equation_residual(model, potential, metric, x, mode=DUAL):
    """D_a (dL/dF_ab) as a (1,0) array; near zero marks on-shell data."""
    frame = GeometryFrame(metric, x, mode)
    F, dF = field_strength_jets(potential, x, mode)
    data = ModelPointData(model, frame.g, frame.ginv, frame.dginv, F, dF)
    gamma = frame.gamma
    return (np.einsum("aab->b", data.dP)
            + np.einsum("aae,eb->b", gamma, data.P)
            + np.einsum("bae,ae->b", gamma, data.P))
