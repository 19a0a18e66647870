import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catlab import catenoid
from catlab.errors import DivergenceError, DomainError

# mpmath quad at 30 digits of int_1^inf ds / sqrt(s^(2(n-1)) - 1)
HEIGHT_SUP = {3: 1.3110287771460599, 4: 0.70109105266272712, 5: 0.48197582407518866, 6: 0.36790939804058808}
# mpmath quad of 2 Omega_(n-1) [int_1^inf s^(1-n) / (c (1 + c)) ds - 1/n], c = sqrt(1 - s^(2-2n))
EXCESS = {3: 10.983248999804992, 4: 6.919491338924423, 5: 5.0740380954785627, 6: 3.8025001963096769}


def test_sphere_volumes():
    assert catenoid.sphere_volume(1) == pytest.approx(2 * math.pi)
    assert catenoid.sphere_volume(2) == pytest.approx(4 * math.pi)
    assert catenoid.sphere_volume(3) == pytest.approx(2 * math.pi**2)


@pytest.mark.parametrize("t", [1.0, 1.5, 2.0, 10.0, 1e3, 1e6])
def test_n2_height_is_arccosh(t):
    assert catenoid.height(2, 1.0, t) == pytest.approx(math.acosh(t), abs=1e-12)


def test_height_examples():
    assert catenoid.height(2, 1.0, 1.0) == 0.0
    assert catenoid.height(2, 1.0, 2.0) == pytest.approx(1.3169578969248166, abs=1e-13)
    assert catenoid.height(3, 1.0, 1e12) == pytest.approx(HEIGHT_SUP[3], abs=1e-6)


def test_height_rejects_inside_neck():
    with pytest.raises(DomainError):
        catenoid.height(3, 1.0, 0.5)


def test_height_array_matches_scalar():
    ts = np.array([1.0, 1.01, 3.0, 70.0])
    arr = catenoid.height(4, 2.0, 2 * ts)
    assert np.allclose(arr, [catenoid.height(4, 2.0, 2 * t) for t in ts], rtol=0, atol=1e-14)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_height_sup_against_oracle(n):
    assert catenoid.height_sup(n) == pytest.approx(HEIGHT_SUP[n], abs=1e-12)
    assert 2 * catenoid.height_sup(n) < 2.7


def test_height_sup_n2_diverges():
    with pytest.raises(DivergenceError):
        catenoid.height_sup(2)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.floats(0.01, 100.0), st.floats(1.0, 1e4))
def test_height_scaling(n, lam, sigma):
    assert catenoid.height(n, lam, lam * sigma) == pytest.approx(lam * catenoid.height(n, 1.0, sigma), rel=1e-12, abs=1e-300)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6))
def test_slice_radius_monotone(n):
    ts = np.geomspace(1.0, 1e5, 300)
    radius = ts**2 + catenoid.height(n, 1.0, ts) ** 2
    assert np.all(np.diff(radius) > 0)


def test_second_fundamental_norm_examples():
    assert catenoid.second_fundamental_norm(2, 1.0, 1.0) == pytest.approx(math.sqrt(2))
    assert catenoid.second_fundamental_norm(3, 2.0, 2.0) == pytest.approx(math.sqrt(6) / 2)
    a = catenoid.second_fundamental_norm(2, 1.0, 100.0)
    assert a < 1e-3 and 100 * a < 1e-1


def test_curvature_by_finite_differences():
    # kappa_mer = h'' / (1 + h'^2)^(3/2) of the profile curve, by central differences
    n, t, step = 3, 1.7, 1e-4
    h = lambda x: catenoid.height(n, 1.0, x)
    d1 = (h(t + step) - h(t - step)) / (2 * step)
    d2 = (h(t + step) - 2 * h(t) + h(t - step)) / step**2
    kappa = d2 / (1 + d1 * d1) ** 1.5
    kappa_mer, kappa_rot = catenoid.principal_curvatures(n, 1.0, t)
    assert abs(kappa) == pytest.approx(abs(kappa_mer), rel=1e-5)
    assert kappa_mer + (n - 1) * kappa_rot == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("R", [1.5, 5.0, 37.0])
def test_ball_slice_solves_sphere_equation(R):
    for n in (2, 4):
        sl = catenoid.ball_slice(n, 1.0, R)
        assert sl.t**2 + sl.h**2 == pytest.approx(R * R, rel=1e-14)


def test_ball_slice_n2_root():
    assert catenoid.t_of_R(2, 1.0, 5.0) == pytest.approx(4.4977317284042656, abs=1e-12)


def test_disk_areas():
    assert catenoid.disk_area(2, 1.0) == pytest.approx(math.pi)
    assert catenoid.disk_area(2, 3.0) == pytest.approx(9 * math.pi)
    assert catenoid.disk_area(3, 2.0) == pytest.approx(32 * math.pi / 3)


def test_area_in_ball_n2_closed_form():
    R = math.hypot(2.0, math.acosh(2.0))
    expected = 2 * math.pi * (math.acosh(2.0) + 2 * math.sqrt(3.0))
    assert catenoid.area_in_ball(2, 1.0, R) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(30.040282878942747, abs=1e-12)
    assert catenoid.area_in_ball(2, 1.0, 1.0) == 0.0


def test_area_in_ball_n3_exceeds_disks():
    sl = catenoid.ball_slice(3, 1.0, 10.0)
    assert catenoid.area_in_ball(3, 1.0, 10.0) - 2 * catenoid.disk_area(3, sl.t) > 0


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_excess_constant_against_oracle(n):
    assert catenoid.excess_constant(n) == pytest.approx(EXCESS[n], abs=1e-8)
    lim = catenoid.excess_limit(n)
    assert lim.window < 1e-6


def test_standard_excess_increases_to_limit():
    ts = [2.0, 10.0, 100.0, 1e4]
    es = [catenoid.standard_excess(3, t) for t in ts]
    assert all(b > a for a, b in zip(es, es[1:]))
    assert es[-1] < EXCESS[3]


def test_excess_n2_diverges_logarithmically():
    with pytest.raises(DivergenceError):
        catenoid.excess_constant(2)
    for R in (math.e, 10.0, 100.0, 1e3):
        assert catenoid.log_excess_n2(R) > 2 * math.pi * (math.log(R) - 1)
    with pytest.raises(DomainError):
        catenoid.log_excess_n2(1.5)


@pytest.mark.parametrize("n", [2, 5])
def test_flux_limit(n):
    assert catenoid.two_sheet_flux(n, 1.0, 1e4) == pytest.approx(2.0, abs=1e-3)


def test_flux_scale_invariance():
    assert catenoid.two_sheet_flux(2, 2.0, 2e4) == pytest.approx(catenoid.two_sheet_flux(2, 1.0, 1e4), rel=1e-9)
    with pytest.raises(DomainError):
        catenoid.two_sheet_flux(3, 1.0, 1.5)


def test_normal_line_hits_lower_sheet():
    n, t = 3, 4.0
    nl = catenoid.normal_line(n, t)
    # foot on the lower sheet: z = -H(t_h)
    assert nl.z_h == pytest.approx(-catenoid.height(n, 1.0, nl.t_h), abs=1e-12)
    assert nl.w > 2 * catenoid.height(n, 1.0, t) * 0.99


def test_profile_table_columns():
    prof = catenoid.CatenoidProfile.build(3, 1.0, 50.0)
    t, h, a_norm, area = np.asarray(prof.table()).T[:4]
    assert t[0] == 1.0 and t[-1] == pytest.approx(50.0)
    assert np.all(np.diff(h) > 0) and np.all(np.diff(area) > 0)
    assert np.allclose(a_norm, catenoid.second_fundamental_norm(3, 1.0, t))
