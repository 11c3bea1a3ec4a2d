import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emtensor.errors import ConfigError, DomainError
from emtensor.scalars import (DUAL, Dual, FdScheme, fd_mode, fd_partial,
                              fd_second, generic_det, generic_inverse, jet2,
                              seed_partial, seed_second, sin, cos, exp, sqrt,
                              value_of)


def test_product_rule_example():
    f = lambda c: c[0] * c[1]
    assert seed_partial(f, (2.0, 3.0), 0) == 3.0
    assert seed_partial(f, (2.0, 3.0), 1) == 2.0


def test_constant_has_zero_derivative():
    assert seed_partial(lambda c: 5.0, (1.0, 2.0), 0) == 0.0
    assert seed_second(lambda c: 5.0, (1.0, 2.0), 0, 1) == 0.0


def test_sin_derivative_matches_fd_extrapolation():
    f = lambda c: sin(c[0])
    exact = seed_partial(f, (0.7,), 0)
    # Richardson-extrapolated central differences as the independent oracle
    d1 = fd_partial(f, (0.7,), 0, FdScheme(1e-3))
    d2 = fd_partial(f, (0.7,), 0, FdScheme(5e-4))
    extrapolated = (4.0 * d2 - d1) / 3.0
    assert exact == pytest.approx(math.cos(0.7), abs=1e-15)
    assert abs(exact - extrapolated) < 1e-12


def test_mixed_second_partial_example():
    f = lambda c: c[0] * c[1]
    assert seed_second(f, (2.0, 3.0), 0, 1) == 1.0


def test_second_partial_vs_fd():
    f = lambda c: exp(c[0] * c[1])
    exact = seed_second(f, (0.5, 0.2), 0, 1)
    approx = fd_second(f, (0.5, 0.2), 0, 1, FdScheme(1e-4))
    assert abs(exact - approx) < 1e-6


def test_second_partial_symmetric_exactly():
    f = lambda c: sin(c[0] * c[1]) * exp(c[1]) + c[0] ** 3
    a = seed_second(f, (0.4, 0.9), 0, 1)
    b = seed_second(f, (0.4, 0.9), 1, 0)
    assert a == b  # bit-for-bit


def test_fd_exact_on_quadratics():
    f = lambda c: c[0] ** 2
    assert fd_partial(f, (1.0,), 0, FdScheme(0.1)) == pytest.approx(2.0, abs=1e-14)


def test_fd_scheme_validation():
    with pytest.raises(ConfigError):
        FdScheme(h=-1.0)
    with pytest.raises(ConfigError):
        FdScheme(h=0.1, order=4)


def test_fd_dual_convergence_is_second_order():
    maps = [lambda c: sin(c[0]) * c[1] ** 2,
            lambda c: exp(0.3 * c[0]) + cos(c[1] * c[0]),
            lambda c: 1.0 / (1.0 + c[0] ** 2 + c[1] ** 2)]
    x = (0.6, 1.1)
    for f in maps:
        exact = seed_partial(f, x, 0)
        errs = [abs(fd_partial(f, x, 0, FdScheme(h)) - exact)
                for h in (1e-2, 5e-3, 2.5e-3)]
        for e0, e1 in zip(errs, errs[1:]):
            assert 3.5 < e0 / e1 < 4.5


def test_jet2_consistency():
    f = lambda c: sin(c[0]) * c[1] ** 2
    val, grad, hess = jet2(f, (0.7, 1.3))
    assert val == pytest.approx(math.sin(0.7) * 1.69)
    assert grad[0] == pytest.approx(math.cos(0.7) * 1.69)
    assert grad[1] == pytest.approx(math.sin(0.7) * 2.6)
    assert hess[0, 1] == hess[1, 0]
    assert hess[0, 1] == pytest.approx(math.cos(0.7) * 2.6)
    # fd engine agrees at O(h^2)
    _, grad_f, hess_f = jet2(f, (0.7, 1.3), fd_mode(1e-4))
    assert np.max(np.abs(grad - grad_f)) < 1e-7
    assert np.max(np.abs(hess - hess_f)) < 1e-6


def test_sqrt_domain_error():
    with pytest.raises(DomainError):
        sqrt(-1.0)
    with pytest.raises(DomainError):
        sqrt(Dual(-2.0, 1.0))


def test_dual_division_and_pow():
    x = Dual(2.0, 1.0)
    y = (1.0 / x)
    assert y.val == 0.5 and y.eps == -0.25
    z = x ** 3
    assert z.val == 8.0 and z.eps == 12.0
    w = x ** Dual(2.0, 0.0)
    assert w.val == pytest.approx(4.0)


def test_dual_batched_slots():
    x = Dual(np.full(3, 2.0), np.eye(3)[0])
    y = x * x + 1.0
    assert np.allclose(y.val, 5.0)
    assert np.allclose(y.eps, [4.0, 0.0, 0.0])


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3),
       st.floats(-1.5, 1.5))
@settings(max_examples=40, deadline=None)
def test_polynomial_derivative_exact(coeffs, x0):
    a, b, c = coeffs
    f = lambda co: a * co[0] ** 3 + b * co[0] ** 2 + c * co[0]
    expected = 3 * a * x0 ** 2 + 2 * b * x0 + c
    assert seed_partial(f, (x0,), 0) == pytest.approx(expected, abs=1e-9, rel=1e-9)


@given(st.floats(-1.2, 1.2), st.floats(-1.2, 1.2))
@settings(max_examples=40, deadline=None)
def test_chain_rule_on_trig_composition(u, v):
    f = lambda c: sin(c[0] * c[1] + c[1] ** 2)
    got = seed_partial(f, (u, v), 1)
    expected = math.cos(u * v + v * v) * (u + 2 * v)
    assert got == pytest.approx(expected, abs=1e-10)


def test_generic_inverse_and_det():
    m = [[2.0, 0.3], [0.3, 1.5]]
    inv = generic_inverse(m)
    prod = np.array([[sum(m[i][k] * inv[k][j] for k in range(2))
                      for j in range(2)] for i in range(2)], dtype=float)
    assert np.allclose(prod, np.eye(2))
    assert value_of(generic_det(m)) == pytest.approx(2.0 * 1.5 - 0.09)
    # dual entries propagate derivatives: d(det)/da for [[a, .3], [.3, 1.5]]
    md = [[Dual(2.0, 1.0), 0.3], [0.3, 1.5]]
    det = generic_det(md)
    assert det.eps == pytest.approx(1.5)
