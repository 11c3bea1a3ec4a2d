import numpy as np
import pytest

from emtensor.errors import DomainError
from emtensor.expressions import parse_expression
from emtensor.gauge import (GaugePotential, bianchi_residual,
                            covariant_field_strength,
                            field_equation_residual, field_strength,
                            field_strength_jets, gauge_shift)
from emtensor.geometry import Chart, MetricField
from emtensor.lagrangian import catalog_models, make_model

MINK_NAMES = ("t", "x", "y", "z")
SPH_NAMES = ("t", "r", "th", "ph")


def pe(src, names=MINK_NAMES):
    return parse_expression(src, names)


@pytest.fixture(scope="module")
def mink():
    chart = Chart(MINK_NAMES, ((-1.2, 1.2),) * 4)
    comps = {(i, i): pe("-1" if i == 0 else "1") for i in range(4)}
    return MetricField(chart, comps, (-1, 1, 1, 1))


@pytest.fixture(scope="module")
def schwarzschild():
    chart = Chart(SPH_NAMES, ((-1, 1), (3, 8), (0.6, 2.5), (0.3, 5.9)))
    comps = {(0, 0): pe("-(1 - 2/r)", SPH_NAMES),
             (1, 1): pe("1/(1 - 2/r)", SPH_NAMES),
             (2, 2): pe("r^2", SPH_NAMES),
             (3, 3): pe("r^2*sin(th)^2", SPH_NAMES)}
    return MetricField(chart, comps, (-1, 1, 1, 1))


@pytest.fixture(scope="module")
def plane_wave(mink):
    return GaugePotential(mink.chart, tuple(
        pe(s) for s in ("0", "0", "0.3*cos(1.7*(t - x))", "0")))


@pytest.fixture(scope="module")
def coulomb(schwarzschild):
    return GaugePotential(schwarzschild.chart, tuple(
        pe(s, SPH_NAMES) for s in ("0.1/r", "0", "0", "0")))


def test_zero_potential_zero_field(mink):
    A = GaugePotential(mink.chart, tuple(pe("0") for _ in range(4)))
    F = field_strength(A, (0.1, 0.2, 0.3, 0.4))
    assert np.max(np.abs(F.matrix)) == 0.0


def test_plane_wave_components(plane_wave):
    x = (0.3, 0.5, -0.2, 0.8)
    a, w = 0.3, 1.7
    u = w * (x[0] - x[1])
    F = field_strength(plane_wave, x).matrix
    assert F[0, 2] == pytest.approx(-a * w * np.sin(u), abs=1e-14)
    assert F[1, 2] == pytest.approx(a * w * np.sin(u), abs=1e-14)
    assert np.max(np.abs(F + F.T)) == 0.0  # antisymmetric exactly


def test_coulomb_field_strength(coulomb):
    x = (0.2, 4.5, 1.2, 0.7)
    F = field_strength(coulomb, x).matrix
    assert abs(F[1, 0]) == pytest.approx(0.1 / 4.5 ** 2, abs=1e-14)
    assert F[1, 0] < 0  # F_rt = d_r A_t with A_t = q/r


def test_upper_triangle_storage(plane_wave):
    F = field_strength(plane_wave, (0.3, 0.5, -0.2, 0.8))
    assert all(a < b for (a, b) in F.upper)


def test_bianchi_on_flat_curved_and_random(plane_wave, coulomb, mink,
                                           schwarzschild):
    assert bianchi_residual(plane_wave, mink, (0.3, 0.5, -0.2, 0.8)) < 1e-12
    assert bianchi_residual(coulomb, schwarzschild, (0.2, 4.5, 1.2, 0.7)) < 1e-10
    rng = np.random.default_rng(5)
    chart = schwarzschild.chart
    for _ in range(5):
        coeffs = rng.normal(size=(4, 4)) * 0.3
        comps = []
        for b in range(4):
            def comp(coords, c=coeffs[b]):
                from emtensor.scalars import sin
                return (c[0] * coords[0] * coords[1] + c[1] * coords[2] ** 2
                        + c[2] * sin(coords[3]) + c[3] * coords[1])
            comps.append(comp)
        A = GaugePotential(chart, tuple(comps))
        x = chart.sample_points(3, seed=rng.integers(1 << 30))[0]
        assert bianchi_residual(A, schwarzschild, x) < 1e-10


def test_plane_wave_on_shell_for_all_models(plane_wave, mink):
    # a null field solves the equations of every invariant-built model
    for model in catalog_models():
        res = field_equation_residual(model, plane_wave, mink,
                                      (0.3, 0.5, -0.2, 0.8))
        assert np.max(np.abs(res)) < 1e-10


def test_coulomb_on_schwarzschild_on_shell(coulomb, schwarzschild):
    for x in schwarzschild.chart.sample_points(6, seed=8):
        res = field_equation_residual(make_model("maxwell"), coulomb,
                                      schwarzschild, x)
        assert np.max(np.abs(res)) < 1e-9


def test_inverse_cube_potential_off_shell():
    # flat spherical chart; A_t = q/r^3 gives residual 3q/r^5 in the t slot
    chart = Chart(SPH_NAMES, ((-1, 1), (3, 8), (0.6, 2.5), (0.3, 5.9)))
    comps = {(0, 0): pe("-1", SPH_NAMES), (1, 1): pe("1", SPH_NAMES),
             (2, 2): pe("r^2", SPH_NAMES), (3, 3): pe("r^2*sin(th)^2", SPH_NAMES)}
    flat = MetricField(chart, comps, (-1, 1, 1, 1))
    q = 0.1
    A = GaugePotential(chart, tuple(
        pe(s, SPH_NAMES) for s in ("0.1/r^3", "0", "0", "0")))
    x = (0.2, 4.5, 1.2, 0.7)
    res = field_equation_residual(make_model("maxwell"), A, flat, x)
    assert abs(res[0]) == pytest.approx(3.0 * q / 4.5 ** 5, rel=1e-10)


def test_gauge_shift_constant_is_identity(plane_wave):
    shifted = gauge_shift(plane_wave, pe("4.25"))
    x = (0.3, 0.5, -0.2, 0.8)
    assert np.allclose(shifted.values(x), plane_wave.values(x))


def test_gauge_shift_pure_gauge(mink):
    A = GaugePotential(mink.chart, tuple(pe("0") for _ in range(4)))
    shifted = gauge_shift(A, pe("t*x"))
    x = (0.3, 0.5, -0.2, 0.8)
    assert np.allclose(shifted.values(x), [0.5, 0.3, 0.0, 0.0])
    assert np.max(np.abs(field_strength(shifted, x).matrix)) < 1e-12


def test_gauge_shift_preserves_field_strength(coulomb):
    shifted = gauge_shift(coulomb, pe("0.3*t*r", SPH_NAMES))
    x = (0.2, 4.5, 1.2, 0.7)
    F0 = field_strength(coulomb, x).matrix
    F1 = field_strength(shifted, x).matrix
    assert np.max(np.abs(F1 - F0)) < 1e-12
    assert np.max(np.abs(shifted.values(x) - coulomb.values(x))) > 0.1


def test_gauge_shift_has_no_second_jets(coulomb):
    shifted = gauge_shift(coulomb, pe("0.3*t*r", SPH_NAMES))
    with pytest.raises(DomainError):
        shifted.jets((0.2, 4.5, 1.2, 0.7), order=2)


def test_covariant_equals_plain_exterior_derivative(coulomb, schwarzschild):
    x = (0.2, 4.5, 1.2, 0.7)
    plain = field_strength(coulomb, x).matrix
    cov = covariant_field_strength(coulomb, schwarzschild, x)
    assert np.max(np.abs(cov - plain)) < 1e-12


def test_field_strength_jets_consistency(plane_wave):
    x = (0.3, 0.5, -0.2, 0.8)
    F, dF = field_strength_jets(plane_wave, x)
    assert np.max(np.abs(F - field_strength(plane_wave, x).matrix)) == 0.0
    assert np.max(np.abs(dF + dF.transpose(0, 2, 1))) == 0.0
