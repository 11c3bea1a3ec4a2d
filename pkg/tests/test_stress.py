import numpy as np
import pytest

from emtensor.expressions import parse_expression
from emtensor.gauge import GaugePotential, gauge_shift
from emtensor.geometry import Chart, MetricField, VectorField
from emtensor.lagrangian import catalog_models, make_model, make_scalar_model
from emtensor.stress import (GaugeFrame, ScalarFrame, canonical_tensor,
                             metric_tensor, noether_current,
                             scalar_canonical_tensor, traditional_tensor)

MINK_NAMES = ("t", "x", "y", "z")


def pe(src, names=MINK_NAMES):
    return parse_expression(src, names)


@pytest.fixture(scope="module")
def mink():
    chart = Chart(MINK_NAMES, ((-1.2, 1.2),) * 4)
    comps = {(i, i): pe("-1" if i == 0 else "1") for i in range(4)}
    return MetricField(chart, comps, (-1, 1, 1, 1))


@pytest.fixture(scope="module")
def const_e(mink):
    # E = 1 with extra gauge structure that makes every asymmetry visible
    return GaugePotential(mink.chart, tuple(
        pe(s) for s in ("t + 0.5*y", "-t", "0.5*t", "0")))


@pytest.fixture(scope="module")
def maxwell():
    return make_model("maxwell")


X0 = (0.3, 0.5, -0.2, 0.8)


def test_vacuum_gives_zero_tensors(mink, maxwell):
    A = GaugePotential(mink.chart, tuple(pe("0") for _ in range(4)))
    for op in (canonical_tensor, metric_tensor, traditional_tensor):
        T = op(maxwell, A, mink, X0)
        assert np.max(np.abs(T.components)) == 0.0


def test_canonical_matches_hand_maxwell_oracle(mink, const_e, maxwell):
    frame = GaugeFrame(mink, const_e, X0)
    Tc = frame.canonical(maxwell, with_derivatives=False)
    g = frame.geo.g
    ginv = frame.geo.ginv
    F = frame.F
    # hand oracle built with explicit loops, nothing shared with the library
    n = 4
    Fup = np.zeros((n, n))
    Fmix = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                Fmix[a, b] += ginv[a, c] * F[c, b]
                for d in range(n):
                    Fup[a, b] += ginv[a, c] * ginv[b, d] * F[c, d]
    s = sum(F[a, b] * Fup[a, b] for a in range(n) for b in range(n))
    hand = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            hand[a, b] = sum(Fmix[a, c] * Fup[b, c] for c in range(n)) \
                - 0.25 * ginv[a, b] * s
    assert np.max(np.abs(Tc - hand)) < 1e-14
    assert Tc[0, 0] == pytest.approx(0.5)   # energy density E^2/2
    assert Tc[1, 1] == pytest.approx(-0.5)  # tension along the field


def test_coincidence_across_models(mink, const_e):
    frame = GaugeFrame(mink, const_e, X0)
    for model in catalog_models():
        Tc = frame.canonical(model, with_derivatives=False)
        Tm = frame.metric_seeded(model)
        assert np.max(np.abs(Tc - Tm)) < 1e-12 * (1 + np.max(np.abs(Tc)))


def test_metric_tensor_symmetric_by_construction(mink, const_e, maxwell):
    T = metric_tensor(maxwell, const_e, mink, X0).components
    assert np.max(np.abs(T - T.T)) < 1e-14


def test_traditional_asymmetry_witness(mink, const_e, maxwell):
    T = traditional_tensor(maxwell, const_e, mink, X0).components
    anti = 0.5 * np.max(np.abs(T - T.T))
    assert anti >= 0.1  # >= 0.1 E^2 with E = 1
    assert anti == pytest.approx(0.5)


def test_traditional_gauge_dependence(mink, const_e, maxwell):
    # two gauges of the same constant field strength
    axial = GaugePotential(mink.chart, tuple(pe(s) for s in ("0", "-t", "0", "0")))
    temporal = GaugePotential(mink.chart, tuple(pe(s) for s in ("x", "0", "0", "0")))
    Ta = traditional_tensor(maxwell, axial, mink, X0).components
    Tt = traditional_tensor(maxwell, temporal, mink, X0).components
    Fa = GaugeFrame(mink, axial, X0).F
    Ft = GaugeFrame(mink, temporal, X0).F
    assert np.max(np.abs(Fa - Ft)) < 1e-14
    assert np.max(np.abs(Ta - Tt)) > 0.1


def test_pure_gauge_traditional_vanishes(mink, maxwell):
    A = GaugePotential(mink.chart, tuple(pe("0") for _ in range(4)))
    shifted = gauge_shift(A, pe("0.7*t*x + 0.2*y^2"))
    T = traditional_tensor(maxwell, shifted, mink, X0).components
    assert np.max(np.abs(T)) < 1e-14


def test_gauge_shift_moves_traditional_not_canonical(mink, const_e, maxwell):
    shifted = gauge_shift(const_e, pe("0.3*t^2"))
    Tc0 = canonical_tensor(maxwell, const_e, mink, X0).components
    Tc1 = canonical_tensor(maxwell, shifted, mink, X0).components
    Tt0 = traditional_tensor(maxwell, const_e, mink, X0).components
    Tt1 = traditional_tensor(maxwell, shifted, mink, X0).components
    assert np.max(np.abs(Tc1 - Tc0)) < 1e-12
    assert np.max(np.abs(Tt1 - Tt0)) == pytest.approx(0.6, abs=1e-12)


def test_scalar_tensors(mink):
    model = make_scalar_model()
    phi_t = pe("t")
    T = scalar_canonical_tensor(model, phi_t, mink, X0).components
    assert T[0, 0] == pytest.approx(0.5)
    frame = ScalarFrame(mink, phi_t, model, X0)
    assert np.max(np.abs(frame.canonical() - frame.metric_seeded())) < 1e-14
    const = scalar_canonical_tensor(model, pe("2.0"), mink, X0).components
    assert np.max(np.abs(const)) == 0.0


def test_noether_current_bilinearity(mink, const_e, maxwell):
    T = canonical_tensor(maxwell, const_e, mink, X0)
    xi1 = VectorField(mink.chart, tuple(pe(s) for s in ("x", "t", "0", "0")))
    xi2 = VectorField(mink.chart, tuple(pe(s) for s in ("0", "-y", "x", "0")))
    xi_sum = VectorField(mink.chart, tuple(
        pe(s) for s in ("x", "t - y", "x", "0")))
    xi_double = VectorField(mink.chart, tuple(
        pe(s) for s in ("2*x", "2*t", "0", "0")))
    j1 = noether_current(T, xi1, mink, X0).components
    j2 = noether_current(T, xi2, mink, X0).components
    js = noether_current(T, xi_sum, mink, X0).components
    jd = noether_current(T, xi_double, mink, X0).components
    assert np.max(np.abs(j1 + j2 - js)) < 1e-14
    assert np.max(np.abs(2 * j1 - jd)) < 1e-14
    zero = VectorField(mink.chart, tuple(pe("0") for _ in range(4)))
    assert np.max(np.abs(noether_current(T, zero, mink, X0).components)) == 0.0


def test_divergence_cross_form_agrees(mink, const_e, maxwell):
    frame = GaugeFrame(mink, const_e, X0)
    T = frame.canonical(maxwell)
    dT = frame.dcanonical(maxwell)
    direct = frame.divergence(T, dT)
    cross = frame.divergence_cross_form(T, dT)
    assert np.max(np.abs(direct - cross)) < 1e-12


def test_master_identity_pointwise(mink, maxwell):
    wave = GaugePotential(mink.chart, tuple(
        pe(s) for s in ("0", "0", "0.3*cos(1.7*(t - x))", "0")))
    frame = GaugeFrame(mink, wave, X0)
    T = frame.canonical(maxwell)
    dT = frame.dcanonical(maxwell)
    Tm = frame.metric_chain(maxwell)
    for comps in (("x", "sin(t)", "0", "0"),
                  ("t*y", "0.3*x^2", "cos(z)", "0.1*t")):
        xi = VectorField(mink.chart, tuple(pe(s) for s in comps))
        div, _ = frame.current_divergence(T, dT, xi)
        rhs = 0.5 * float(np.einsum("ab,ab", Tm, frame.lie_metric(xi)))
        assert abs(div - rhs) < 1e-12
    zero = VectorField(mink.chart, tuple(pe("0") for _ in range(4)))
    div, _ = frame.current_divergence(T, dT, zero)
    assert div == 0.0


def test_traditional_rotation_current_not_conserved(mink, const_e, maxwell):
    frame = GaugeFrame(mink, const_e, X0)
    T = frame.traditional(maxwell)
    dT = frame.dtraditional(maxwell)
    rot = VectorField(mink.chart, tuple(pe(s) for s in ("0", "-y", "x", "0")),
                      kind="killing")
    div, _ = frame.current_divergence(T, dT, rot)
    assert abs(div) == pytest.approx(0.5)
    for comps in (("1", "0", "0", "0"), ("0", "0", "0", "1")):
        tr = VectorField(mink.chart, tuple(pe(s) for s in comps), kind="constant")
        div, _ = frame.current_divergence(T, dT, tr)
        assert abs(div) < 1e-14
