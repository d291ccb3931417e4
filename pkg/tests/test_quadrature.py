"""Direct quadrature of the Bessel-kernel integrals.

The frozen point values come from mpmath oracles at 30 digits:
    integrand(1, 1, (1,1)) = I1(2)/(e(2e-1))^2 = 0.010936759004610180
    2 c_3                  = 0.14885277443216080
"""

import math
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from minkqm.errors import DomainError, PrecisionUnreachableError, ResourceLimitError
from minkqm.moments import v_term
from minkqm.quadrature import QuadConfig, box_tail_bound, kernel_integrand, kernel_integral
from minkqm.special import c_coeff


def test_config_validation():
    with pytest.raises(DomainError):
        QuadConfig(X=0.0)
    with pytest.raises(DomainError):
        QuadConfig(nodes_per_axis=4)
    with pytest.raises(DomainError):
        QuadConfig(rule="simpson")


def test_integrand_ell0_closed_form():
    for t in (Fraction(1, 2), Fraction(2), Fraction(7, 3)):
        ball = kernel_integrand(1, 0, (t,))
        with mp.workprec(120):
            want = 1 / (mp.exp(t) * (2 * mp.exp(t) - 1))
            assert abs(ball.value - want) <= ball.radius + mpf("1e-25")


def test_integrand_point_oracle():
    ball = kernel_integrand(1, 1, (1, 1))
    assert abs(float(ball.value) - 0.010936759004610180) < 1e-15


def test_integrand_positive_and_validated():
    assert kernel_integrand(2, 2, (0.5, 1.5, 3.0)).lo > 0
    with pytest.raises(DomainError):
        kernel_integrand(1, 1, (1.0, 0.0))
    with pytest.raises(DomainError):
        kernel_integrand(1, 1, (1.0,))
    with pytest.raises(DomainError):
        kernel_integrand(0, 0, (1.0,))


def test_tail_bound_shrinks_with_x():
    tails = [float(box_tail_bound(1, 2, X)) for X in (10.0, 20.0, 40.0)]
    assert tails[0] > tails[1] > tails[2]
    assert tails[2] < 1e-8
    assert float(box_tail_bound(1, 0, 40.0)) < 1e-30


def test_kernel_integral_ell0_matches_c_series():
    for L in (1, 4, 6):
        got = kernel_integral(L, 0, QuadConfig(nodes_per_axis=64))
        want = c_coeff(L, 1e-14) * math.factorial(L - 1)
        assert got.agrees(want, 1e-8)
    got3 = kernel_integral(3, 0, QuadConfig(nodes_per_axis=64))
    assert abs(float(got3.value) - 0.14885277443216080) < 1e-9


def test_kernel_integral_matches_series_route():
    got = kernel_integral(1, 1, QuadConfig(nodes_per_axis=48))
    assert got.agrees(v_term(1, 1, Q=200), 1e-6)
    got2 = kernel_integral(1, 2, QuadConfig(nodes_per_axis=32))
    assert got2.agrees(v_term(1, 2, Q=200), 1e-4)


def test_tanh_sinh_rule_agrees_with_gauss():
    a = kernel_integral(1, 1, QuadConfig(nodes_per_axis=48))
    b = kernel_integral(1, 1, QuadConfig(nodes_per_axis=96, rule="tanh-sinh"))
    assert a.agrees(b)


def test_resource_and_precision_errors():
    with pytest.raises(ResourceLimitError):
        kernel_integral(1, 3, QuadConfig())
    with pytest.raises(PrecisionUnreachableError):
        kernel_integral(1, 2, QuadConfig(nodes_per_axis=8), target=1e-12, max_doublings=1)
