import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catlab.errors import AccuracyError, BracketError, DivergenceError, DomainError, PreconditionError
from catlab.numerics import (
    DiffSpec,
    QuadratureSpec,
    derivative,
    gronwall_bound,
    integrate,
    integrate_improper,
    ode_bound_check,
    rk4_trajectory,
    solve_scalar,
)

# frozen oracle values (mpmath quad at 30 digits; midpoint rule on 1e6 nodes)
V3 = 1.3110287771460599
V4_MIDPOINT = 0.7010910526301837
V4_MPMATH = 0.70109105266272712
# t with t^2 + arccosh(t)^2 = 25, by bisection to 1e-16
R5_ROOT = 4.4977317284042656


def test_constant_integrand():
    assert integrate(lambda s: 1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)


def test_endpoint_singularity():
    spec = QuadratureSpec(singular_left=True)
    val = integrate(lambda s: 1.0 / np.sqrt(s * s - 1.0), 1.0, 2.0, spec)
    assert val == pytest.approx(math.log(2 + math.sqrt(3)), abs=1e-12)


def test_empty_and_reversed_ranges():
    assert integrate(math.sin, 2.0, 2.0) == 0.0
    with pytest.raises(DomainError):
        integrate(math.sin, 2.0, 1.0)


def test_full_output_reports_error():
    res = integrate(np.exp, 0.0, 1.0, full_output=True)
    assert res.value == pytest.approx(math.e - 1, rel=1e-14)
    assert 0 <= res.error < 1e-12


def test_accuracy_error_carries_estimate():
    spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, max_depth=4)
    with pytest.raises(AccuracyError) as info:
        integrate(lambda s: np.abs(s - 0.3) ** 0.5, 0.0, 1.0, spec)
    assert info.value.estimate == pytest.approx(2.0 / 3.0 * (0.3**1.5 + 0.7**1.5), abs=1e-3)


def test_improper_exact_tail():
    assert integrate_improper(lambda s: s**-2, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_improper_catenoid_heights():
    spec = QuadratureSpec(singular_left=True)
    v3 = integrate_improper(lambda s: 1.0 / np.sqrt(s**4 - 1.0), 1.0, spec)
    v4 = integrate_improper(lambda s: 1.0 / np.sqrt(s**6 - 1.0), 1.0, spec)
    assert v3 == pytest.approx(V3, abs=1e-10)
    assert v4 == pytest.approx(V4_MPMATH, abs=1e-10)
    assert v4 == pytest.approx(V4_MIDPOINT, abs=1e-9)


def test_improper_divergence_signalled():
    with pytest.raises(DivergenceError):
        integrate_improper(lambda s: 1.0 / np.sqrt(s * s - 1.0), 1.0, QuadratureSpec(singular_left=True))


def test_solve_linear_and_slice_root():
    assert solve_scalar(lambda x: x - 1.0, 0.0, 2.0) == pytest.approx(1.0, abs=1e-13)
    root = solve_scalar(lambda t: t * t + math.acosh(t) ** 2 - 25.0, 1.0, 5.0, tol=1e-14)
    assert root == pytest.approx(R5_ROOT, abs=1e-12)


def test_solve_rejects_bad_bracket():
    with pytest.raises(BracketError):
        solve_scalar(lambda x: x * x + 1.0, -1.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_solve_cubic_property(k, c):
    root = solve_scalar(lambda x: k * (x - c) ** 3, c - 7.0, c + 3.0)
    assert abs(root - c) < 1e-4


def test_gronwall_bound_limits():
    assert gronwall_bound(1.0, 0.0, 2.0, 3.0) == pytest.approx(5.0)
    assert gronwall_bound(1.0, 1.0, 0.0, 1.0) == pytest.approx(math.e - 1)


def test_ode_saturating_case_is_tight():
    ts, fs = rk4_trajectory(lambda t, f: 1.0 + f, 0.0, 1.0, 2000)
    assert fs[-1] == pytest.approx(math.e - 1, abs=1e-12)
    assert ode_bound_check(1.0, 1.0, 0.0, 1.0, lambda t, f: 1.0 + f)


def test_ode_constant_and_logistic():
    assert ode_bound_check(1.0, 1.0, 1.0, 2.0, lambda t, f: 0.0)
    rhs = lambda t, f: 1.0 + f - f * f
    assert ode_bound_check(1.0, 1.0, 0.5, 3.0, rhs)
    # explicit Euler oracle with 1e5 steps
    f, h = 0.5, 3.0 / 100000
    for i in range(100000):
        f += h * rhs(i * h, f)
    _, fs = rk4_trajectory(rhs, 0.5, 3.0, 2000)
    assert fs[-1] == pytest.approx(f, abs=1e-4)
    assert fs[-1] < gronwall_bound(1.0, 1.0, 0.5, 3.0)


def test_ode_precondition():
    with pytest.raises(PreconditionError):
        ode_bound_check(1.0, 1.0, 0.0, 1.0, lambda t, f: 2.0 + f)
    with pytest.raises(PreconditionError):
        ode_bound_check(1.0, 1.0, -1.0, 1.0, lambda t, f: 0.0)


@pytest.mark.parametrize(
    "f, x, expected",
    [
        (lambda x: x * x, 3.0, 6.0),
        (math.acosh, 2.0, 1.0 / math.sqrt(3.0)),
        (math.exp, 0.0, 1.0),
    ],
)
def test_derivative_examples(f, x, expected):
    d = derivative(f, x)
    assert d.value == pytest.approx(expected, abs=1e-10)
    assert d.error < 1e-8


def test_derivative_second_order_without_extrapolation():
    exact = 1.0 / math.sqrt(3.0)
    errs = [abs(derivative(math.acosh, 2.0, DiffSpec(h, 1)).value - exact) for h in (0.1, 0.05, 0.025)]
    assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5
