import numpy as np
import pytest

from emtensor.errors import ConfigError, DomainError
from emtensor.expressions import parse_expression
from emtensor.geometry import (Chart, GeometryFrame, MetricField, TensorField,
                               VectorField, christoffel, commutator_residual,
                               covariant_derivative, first_bianchi_residual,
                               killing_residual, lie_derivative_02,
                               metric_compatibility_residual, riemann)
from emtensor.scalars import DUAL, FdScheme, fd_partial


MINK_NAMES = ("t", "x", "y", "z")
SPH_NAMES = ("t", "r", "th", "ph")


def pe(src, names):
    return parse_expression(src, names)


@pytest.fixture(scope="module")
def mink():
    chart = Chart(MINK_NAMES, ((-1.2, 1.2),) * 4)
    comps = {(i, i): pe("-1" if i == 0 else "1", MINK_NAMES) for i in range(4)}
    return MetricField(chart, comps, (-1, 1, 1, 1))


@pytest.fixture(scope="module")
def sphere():
    chart = Chart(("th", "ph"), ((0.4, 2.7), (0.3, 6.0)))
    comps = {(0, 0): pe("1", ("th", "ph")), (1, 1): pe("sin(th)^2", ("th", "ph"))}
    return MetricField(chart, comps, (1, 1))


def _spherical(names, g00, g11):
    chart = Chart(names, ((-1, 1), (3, 11), (0.6, 2.5), (0.3, 5.9)))
    comps = {(0, 0): pe(g00, names), (1, 1): pe(g11, names),
             (2, 2): pe("r^2", names), (3, 3): pe("r^2*sin(th)^2", names)}
    return MetricField(chart, comps, (-1, 1, 1, 1))


@pytest.fixture(scope="module")
def schwarzschild():
    return _spherical(SPH_NAMES, "-(1 - 2/r)", "1/(1 - 2/r)")


@pytest.fixture(scope="module")
def flat_spherical():
    return _spherical(SPH_NAMES, "-1", "1")


def test_chart_requires_dimension_two():
    with pytest.raises(ConfigError):
        Chart(("u",), ((-1, 1),))


def test_chart_domain_enforced(schwarzschild):
    with pytest.raises(DomainError) as err:
        GeometryFrame(schwarzschild, (0.0, 2.1, 1.0, 1.0))
    assert "r" in str(err.value)


def test_chart_samples_stay_inside():
    chart = Chart(("a", "b"), ((0.0, 1.0), (-3.0, 5.0)))
    pts = chart.sample_points(200, seed=4)
    assert pts.shape == (200, 2)
    assert chart.contains(pts.min(axis=0)) and chart.contains(pts.max(axis=0))
    # deterministic given the seed
    assert np.array_equal(pts, chart.sample_points(200, seed=4))


def test_christoffel_flat_cartesian(mink):
    conn = christoffel(mink, (0.1, 0.2, -0.3, 0.9))
    assert np.max(np.abs(conn.gamma)) == 0.0


def test_christoffel_sphere_oracle(sphere):
    conn = christoffel(sphere, (np.pi / 4, 0.5))
    assert conn.gamma[0, 1, 1] == pytest.approx(-0.5, abs=1e-14)
    # lower-index symmetry is exact
    assert np.array_equal(conn.gamma, conn.gamma.transpose(0, 2, 1))


def test_christoffel_schwarzschild_oracle(schwarzschild):
    r = 10.0
    conn = christoffel(schwarzschild, (0.2, r, 1.2, 0.7))
    assert conn.gamma[1, 0, 0] == pytest.approx((r - 2.0) / r ** 3, abs=1e-14)


def test_riemann_flat_in_curvilinear_coordinates(flat_spherical):
    value = riemann(flat_spherical, (0.2, 7.0, 1.1, 2.2))
    assert np.max(np.abs(value.components)) < 1e-12


def test_sphere_ricci_scalar(sphere):
    for x in sphere.chart.sample_points(10, seed=1):
        frame = GeometryFrame(sphere, x)
        assert frame.ricci_scalar == pytest.approx(2.0, abs=1e-10)


def test_schwarzschild_is_vacuum(schwarzschild):
    for x in schwarzschild.chart.sample_points(10, seed=2):
        frame = GeometryFrame(schwarzschild, x)
        assert np.max(np.abs(frame.ricci)) < 1e-10
        assert first_bianchi_residual(frame.riemann) < 1e-10
        riem = frame.riemann
        assert np.max(np.abs(riem + riem.transpose(0, 1, 3, 2))) < 1e-10


def test_metric_compatibility_100_points(schwarzschild):
    for x in schwarzschild.chart.sample_points(100, seed=3):
        assert metric_compatibility_residual(schwarzschild, x) < 1e-12


def test_covariant_derivative_of_scalar_is_partials(schwarzschild):
    f = pe("sin(t)*r^2", SPH_NAMES)
    field = TensorField(schwarzschild.chart,
                        np.array(f, dtype=object).reshape(()), ())
    x = (0.3, 5.0, 1.0, 1.5)
    got = covariant_derivative(field, schwarzschild, x)
    expected = np.array([fd_partial(f, x, d, FdScheme(1e-5)) for d in range(4)])
    assert np.max(np.abs(got - expected)) < 1e-8


def test_covariant_derivative_oneform_vs_fd_oracle(flat_spherical):
    # Coulomb potential on the flat spherical chart
    comps = np.array([pe(s, SPH_NAMES) for s in ("0.5/r", "0", "0", "0")],
                     dtype=object)
    field = TensorField(flat_spherical.chart, comps, ("d",))
    x = (0.3, 5.0, 1.0, 1.5)
    got = covariant_derivative(field, flat_spherical, x)
    gamma = christoffel(flat_spherical, x).gamma
    vals = np.array([float(c((x))) for c in comps])
    fd = np.empty((4, 4))
    for c in range(4):
        for b in range(4):
            fd[c, b] = fd_partial(comps[b], x, c, FdScheme(1e-4))
    expected = fd - np.einsum("dcb,d->cb", gamma, vals)
    assert np.max(np.abs(got - expected)) < 1e-8


def test_covariant_derivative_metric_vanishes(schwarzschild):
    n = 4
    comps = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            comps[a, b] = schwarzschild._map(a, b)
    field = TensorField(schwarzschild.chart, comps, ("d", "d"))
    x = (0.1, 4.2, 1.3, 2.2)
    got = covariant_derivative(field, schwarzschild, x)
    assert np.max(np.abs(got)) < 1e-12


def test_commutator_pins_convention(mink, schwarzschild, sphere):
    flat_oneform = tuple(pe(s, MINK_NAMES) for s in ("t*x", "y^2", "0.3", "sin(z)"))
    assert commutator_residual(mink, flat_oneform, (0.2, 0.4, -0.1, 0.6)) < 1e-12
    coulomb = tuple(pe(s, SPH_NAMES) for s in ("0.1/r", "0", "0", "0"))
    assert commutator_residual(schwarzschild, coulomb, (0.1, 4.0, 1.1, 0.9)) < 1e-10
    sphere_oneform = (pe("0", ("th", "ph")), pe("0.7*cos(th)", ("th", "ph")))
    assert commutator_residual(sphere, sphere_oneform, (1.1, 2.0)) < 1e-10


def test_lie_derivative_zero_vector(mink):
    g = [[pe("-1" if (i == j == 0) else ("1" if i == j else "0"), MINK_NAMES)
          for j in range(4)] for i in range(4)]
    zero = VectorField(mink.chart, tuple(pe("0", MINK_NAMES) for _ in range(4)))
    out = lie_derivative_02(g, zero, (0.1, 0.2, 0.3, 0.4))
    assert np.max(np.abs(out)) == 0.0


def test_lie_derivative_rotation_kills_metric(mink):
    g = [[pe("-1" if (i == j == 0) else ("1" if i == j else "0"), MINK_NAMES)
          for j in range(4)] for i in range(4)]
    rot = VectorField(mink.chart,
                      tuple(pe(s, MINK_NAMES) for s in ("0", "-y", "x", "0")),
                      kind="killing")
    out = lie_derivative_02(g, rot, (0.1, 0.5, -0.4, 0.2))
    assert np.max(np.abs(out)) < 1e-12


def test_lie_partial_equals_covariant_form(schwarzschild):
    names = SPH_NAMES
    field = [[pe("0", names)] * 4 for _ in range(4)]
    field[0][1] = pe("sin(t)*r", names)
    field[1][0] = pe("0.3*r^2", names)
    field[2][3] = pe("cos(th)", names)
    xi = VectorField(schwarzschild.chart,
                     tuple(pe(s, names) for s in ("r", "0.2*t", "sin(ph)", "th")))
    x = (0.2, 5.5, 1.4, 3.0)
    partial = lie_derivative_02(field, xi, x)
    covariant = lie_derivative_02(field, xi, x, metric=schwarzschild)
    assert np.max(np.abs(partial - covariant)) < 1e-12


def test_killing_residuals(mink, schwarzschild):
    x = (0.3, 0.5, -0.2, 0.8)
    boost = VectorField(mink.chart, tuple(
        pe(s, MINK_NAMES) for s in ("x", "t", "0", "0")), kind="killing")
    assert np.max(np.abs(killing_residual(mink, boost, x))) < 1e-12
    xs = (0.2, 5.0, 1.2, 0.7)
    static = VectorField(schwarzschild.chart, tuple(
        pe(s, SPH_NAMES) for s in ("1", "0", "0", "0")), kind="killing")
    assert np.max(np.abs(killing_residual(schwarzschild, static, xs))) < 1e-12
    dilation = VectorField(mink.chart, tuple(
        pe(s, MINK_NAMES) for s in ("0", "x", "y", "z")))
    res = killing_residual(mink, dilation, x)
    assert np.max(np.abs(res)) == pytest.approx(2.0, abs=1e-12)
