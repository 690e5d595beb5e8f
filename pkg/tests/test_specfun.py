"""Special functions against their defining ODEs, classical identities and the
adaptive RK oracle.  Expected values are computed from independent identities,
never from the implementations under test."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dskg import specfun
from dskg.specfun import (DomainError, ODESolverConfig, PoleError, bessel_j, bessel_y,
                          gamma, hyp2f1, kummer_m, kummer_u, legendre_p, legendre_q,
                          ode_integrate, solution_jet, whittaker_m, whittaker_w)


def ode_residual(fn, p, q, z0):
    """|f'' + p f' + q f| / scale with exact derivatives of the evaluator."""
    f0, f1, f2 = solution_jet(fn, z0)
    num = f2 + p(z0) * f1 + q(z0) * f0
    return abs(num) / (1.0 + abs(f0) + abs(f1) + abs(f2))


# ---------------------------------------------------------------- gamma

def test_gamma_classical_values():
    assert abs(gamma(1.0) - 1.0) < 1e-14
    assert abs(gamma(0.5) - math.sqrt(math.pi)) < 1e-13
    for n in range(2, 10):
        assert abs(gamma(n) - math.factorial(n - 1)) / math.factorial(n - 1) < 1e-13


@settings(max_examples=80, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_gamma_recurrence(re, im):
    z = complex(re, im)
    if abs(z) < 0.2 or (abs(im) < 0.1 and re < 0.2):
        return  # too close to a pole for the ratio test
    lhs = gamma(z + 1.0)
    rhs = z * gamma(z)
    assert abs(lhs - rhs) / (abs(lhs) + 1e-300) < 1e-12


def test_gamma_pole():
    with pytest.raises(PoleError):
        gamma(0.0)
    with pytest.raises(PoleError):
        gamma(-3.0)


# ---------------------------------------------------------------- Kummer

def test_kummer_m_at_zero_and_exponential_identity():
    assert abs(kummer_m(0.3 + 0.2j, 1.1, 0.0) - 1.0) < 1e-15
    for z in (0.4, 2.0 + 1.0j, -3.0 + 0.5j):
        want = cmath.exp(z)
        got = kummer_m(0.7 - 0.1j, 0.7 - 0.1j, z)
        assert abs(got - want) / abs(want) < 1e-12


def test_kummer_ode_residual_random_parameters():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = complex(rng.uniform(0.3, 3), rng.uniform(-1, 1))
        z0 = complex(rng.uniform(0.2, 4), rng.uniform(-2, 2))
        # z w'' + (b - z) w' - a w = 0
        res = ode_residual(lambda z: kummer_m(a, b, z),
                           lambda z: (b - z) / z, lambda z: -a / z, z0)
        assert res < 1e-9


def test_kummer_domain_and_pole_errors():
    with pytest.raises(DomainError):
        kummer_m(1.0, 2.0, 80.0)
    with pytest.raises(PoleError):
        kummer_m(1.0, -2.0, 1.0)
    with pytest.raises(PoleError):
        kummer_u(0.5, 2.0, 1.0)  # integer b degenerates the connection


# ---------------------------------------------------------------- Whittaker

ALPHA = 0.042426406871192854j       # boost-translation case parameters
BETA = 0.8649855490626683


def whittaker_pq(alpha, beta):
    p = lambda z: 0.0
    q = lambda z: -0.25 + alpha / z + (0.25 - beta * beta) / (z * z)
    return p, q


def test_whittaker_ode_residual_on_grid():
    p, q = whittaker_pq(ALPHA, BETA)
    for t in np.linspace(0.4, 3.0, 9):
        z0 = 2j * math.sqrt(2.0) * t
        assert ode_residual(lambda z: whittaker_m(ALPHA, BETA, z), p, q, z0) < 1e-8
        assert ode_residual(lambda z: whittaker_w(ALPHA, BETA, z), p, q, z0) < 1e-8


def test_whittaker_m_leading_behavior():
    # M ~ z^(1/2+beta) as z -> 0
    z = 1e-4 * cmath.exp(0.3j)
    ratio = whittaker_m(ALPHA, BETA, z) / z ** (0.5 + BETA)
    assert abs(ratio - 1.0) < 1e-3


def test_whittaker_pair_independent():
    z = 1.5j
    m0, m1, _ = solution_jet(lambda z_: whittaker_m(ALPHA, BETA, z_), z)
    w0, w1, _ = solution_jet(lambda z_: whittaker_w(ALPHA, BETA, z_), z)
    assert abs(m0 * w1 - m1 * w0) > 1e-3


def test_whittaker_w_degenerate_beta_fallback():
    # 2 beta integer: connection degenerates; offset limit keeps the ODE residual small
    p, q = whittaker_pq(0.2, 0.5)
    res = ode_residual(lambda z: whittaker_w(0.2, 0.5, z), p, q, 1.0 + 0.8j)
    assert res < 1e-5


# ---------------------------------------------------------------- Bessel

def bessel_pq(order):
    p = lambda z: 1.0 / z
    q = lambda z: 1.0 - (order / z) ** 2
    return p, q


def test_bessel_j_at_zero():
    assert abs(bessel_j(0.0, 0.0) - 1.0) < 1e-15


def test_bessel_ode_residual():
    # order as produced by the magnetic-translation case with (m, zeta) = (0.3, 0)
    order = math.sqrt(1.0 - 0.09)
    p, q = bessel_pq(order)
    rng = np.random.default_rng(5)
    for _ in range(12):
        z0 = complex(rng.uniform(0.3, 5), rng.uniform(-2, 2))
        assert ode_residual(lambda z: bessel_j(order, z), p, q, z0) < 1e-9
        assert ode_residual(lambda z: bessel_y(order, z), p, q, z0) < 1e-8


def test_bessel_wronskian_identity():
    order = 0.37 + 0.21j
    for z0 in (0.8, 2.0 + 1.0j):
        j0, j1, _ = solution_jet(lambda z: bessel_j(order, z), z0)
        k0, k1, _ = solution_jet(lambda z: bessel_j(-order, z), z0)
        lhs = j0 * k1 - j1 * k0
        want = -2.0 * cmath.sin(order * math.pi) / (math.pi * z0)
        assert abs(lhs - want) < 1e-8


def test_bessel_y_integer_order_offset():
    p, q = bessel_pq(1.0)
    res = ode_residual(lambda z: bessel_y(1.0, z), p, q, 1.7)
    assert res < 1e-5  # documented accuracy loss in the degenerate regime


# ---------------------------------------------------------------- 2F1 / Legendre

def test_hyp2f1_at_zero():
    assert abs(hyp2f1(0.3, 0.7, 1.1, 0.0) - 1.0) < 1e-15


def test_hyp2f1_gauss_ode():
    a, b, c = 0.3 - 0.2j, 1.1, 1.4 + 0.5j
    p = lambda z: (c - (a + b + 1.0) * z) / (z * (1.0 - z))
    q = lambda z: -a * b / (z * (1.0 - z))
    for z0 in (0.2, 0.5 + 0.2j, 0.85):
        assert ode_residual(lambda z: hyp2f1(a, b, c, z), p, q, z0) < 1e-9


def test_hyp2f1_connection_matches_series():
    a, b, c = 0.4, 0.9 - 0.3j, 1.7
    direct = specfun._hyp2f1_series(a, b, c, 0.93)
    via_connection = hyp2f1(a, b, c, 0.93)
    assert abs(direct - via_connection) / abs(direct) < 1e-9


def test_legendre_p1_is_x():
    for x in (-0.6, 0.1, 0.8):
        assert abs(legendre_p(1.0, 0.0, x) - x) < 1e-12


def legendre_pq_coeffs(nu, sigma):
    p = lambda x: -2.0 * x / (1.0 - x * x)
    q = lambda x: (nu * (nu + 1.0) - sigma * sigma / (1.0 - x * x)) / (1.0 - x * x)
    return p, q


def test_legendre_ode_residual_spin_case_parameters():
    # degree/order produced by the rotation case: J = 1, e mu = 0.03, m = 0.5
    nu = math.sqrt(2.25 - 0.0009) - 0.5
    sigma = math.sqrt(0.75)
    p, q = legendre_pq_coeffs(nu, sigma)
    for x0 in np.linspace(-0.85, 0.85, 50):
        assert ode_residual(lambda x: legendre_p(nu, sigma, x), p, q, x0) < 1e-8
        assert ode_residual(lambda x: legendre_q(nu, sigma, x), p, q, x0) < 1e-8


def test_legendre_imaginary_order():
    nu = math.sqrt(0.75) - 0.5
    sigma = 0.9995498987044117j
    p, q = legendre_pq_coeffs(nu, sigma)
    for x0 in (-0.5, 0.0, 0.6):
        assert ode_residual(lambda x: legendre_p(nu, sigma, x), p, q, x0) < 1e-8
        assert ode_residual(lambda x: legendre_q(nu, sigma, x), p, q, x0) < 1e-8


def test_legendre_integer_order_offset_path():
    p, q = legendre_pq_coeffs(1.7, 1.0)
    res = ode_residual(lambda x: legendre_p(1.7, 1.0, x), p, q, 0.3)
    assert res < 1e-5


def test_legendre_domain_errors():
    with pytest.raises(DomainError):
        legendre_p(1.0, 0.0, 1.5)
    with pytest.raises(DomainError):
        legendre_q(1.0, 0.0, -1.0)


# ---------------------------------------------------------------- RK oracle

def test_ode_integrate_sine():
    sol = ode_integrate(lambda v: 0.0, lambda v: 1.0, 0.0, 0.0, 1.0, math.pi)
    val, dval = sol(math.pi / 2)
    assert abs(val - 1.0) < 1e-10
    assert abs(dval) < 1e-10


def test_ode_integrate_backward_direction():
    sol = ode_integrate(lambda v: 0.0, lambda v: 1.0, 0.0, 0.0, 1.0, -math.pi / 2)
    val, _ = sol(-math.pi / 2)
    assert abs(val + 1.0) < 1e-10


def test_ode_integrate_self_convergence():
    p = lambda v: -2.0
    q = lambda v: 0.25 + 0.1j - 0.09 * cmath.exp(2.0 * v)
    outs = []
    for rtol in (1e-8, 5e-9):
        sol = ode_integrate(p, q, -0.5, 1.0, 0.0, 1.5,
                            ODESolverConfig(rtol=rtol, atol=1e-14))
        outs.append(sol(1.2)[0])
    assert abs(outs[0] - outs[1]) < 10 * 1e-8


def test_ode_integrate_dense_output_accuracy():
    sol = ode_integrate(lambda v: 0.0, lambda v: 1.0, 0.0, 0.0, 1.0, 3.0)
    for t in np.linspace(0.1, 2.9, 23):
        v, dv = sol(t)
        assert abs(v - math.sin(t)) < 1e-9
        assert abs(dv - math.cos(t)) < 1e-9


def test_ode_integrate_jet_uses_the_equation():
    sol = ode_integrate(lambda v: 0.0, lambda v: 1.0, 0.0, 0.0, 1.0, 2.0)
    f0, f1, f2 = sol.jet(1.1)
    assert abs(f2 + f0) < 1e-12


def test_ode_integrate_rejects_bad_config():
    with pytest.raises(ValueError):
        ODESolverConfig(rtol=-1.0)


def test_series_determinism():
    a = kummer_m(0.3 + 0.1j, 1.2, 2.0 + 1.0j)
    b = kummer_m(0.3 + 0.1j, 1.2, 2.0 + 1.0j)
    assert a == b
    x = legendre_p(0.9, 0.3, 0.4)
    y = legendre_p(0.9, 0.3, 0.4)
    assert x == y


def test_cross_oracle_kummer_vs_rk():
    # integrate Kummer's equation from series initial data and compare downstream
    a, b = 0.4 - 0.1j, 1.3
    z0, z1 = 0.5, 2.5
    f0, f1, _ = solution_jet(lambda z: kummer_m(a, b, z), z0)
    sol = ode_integrate(lambda z: (b - z) / z, lambda z: -a / z, z0, f0, f1, z1)
    for t in np.linspace(z0, z1, 9):
        got = sol(t)[0]
        want = kummer_m(a, b, complex(t))
        assert abs(got - want) < 1e-7
