import json
import math

import mpmath as mp
import pytest

from catlab import surgery
from catlab.catenoid import excess_constant, sphere_volume
from catlab.errors import ConfigurationError, DomainError, OutOfRegimeError


def test_neck_rule():
    rule = surgery.NeckRule()
    assert rule(1e-4) == pytest.approx(1e-2)
    assert rule.describe() == "R = r**0.5"
    with pytest.raises(ConfigurationError):
        surgery.NeckRule(exponent=1.0)


def test_separation():
    assert surgery.separation(1e-3) == pytest.approx(0.0690775527898, rel=1e-11)
    with pytest.raises(DomainError):
        surgery.separation(1.0)


def test_gain_examples():
    assert surgery.neck_gain(2, 1e-3, 1e-1) >= 2 * math.pi * 1e-6 * (math.log(100) - 1)
    assert surgery.neck_gain(3, 1e-3, 1e-1) >= excess_constant(3) / 2 * 1e-9
    assert surgery.neck_gain(2, 1.0, 4.0) >= 2 * math.pi * (math.log(4.0) - 1)
    # R = e is below the R >= 4r regime
    with pytest.raises(DomainError):
        surgery.neck_gain(2, 1.0, math.e)


def test_gain_approaches_constant():
    g = surgery.neck_gain(4, 1e-6, 1.0)
    assert g / 1e-24 == pytest.approx(excess_constant(4), rel=1e-6)


@pytest.mark.parametrize("n", [2, 4])
def test_loss_against_high_precision_oracle(n):
    r = 1e-3
    sep = 10 * r * abs(math.log(r))
    mp.mp.dps = 40
    rho = mp.sqrt(1 - mp.mpf(sep) ** (2 * n))
    oracle = float(mp.mpf(sphere_volume(n)) * (1 - rho**n))
    loss = surgery.leaf_loss(n, 1.0, r)
    assert loss == pytest.approx(oracle, rel=1e-12)
    assert loss <= n * sphere_volume(n) * sep ** (2 * n)


def test_loss_out_of_regime():
    with pytest.raises(OutOfRegimeError):
        surgery.leaf_loss(2, 1.0, 0.3)
    with pytest.raises(OutOfRegimeError):
        surgery.certify(2, 1.0, r_grid=[0.5])


def test_two_neck_gain_is_additive():
    total = surgery.two_neck_gain(3, 1e-3, 1e-1, 2e-3, 1e-1)
    assert total == pytest.approx(surgery.neck_gain(3, 1e-3, 1e-1) + surgery.neck_gain(3, 2e-3, 1e-1))


@pytest.mark.parametrize("n", [2, 3, 6])
def test_certificate_verdict(n):
    cert = surgery.certify(n, 1.0)
    assert cert.verdict
    assert cert.r_star > min(cert.r_grid)
    # every margin strictly below r_star is positive
    assert all(row.margin > 0 for row in cert.rows if row.r < cert.r_star)
    assert cert.conclusion_holds


def test_certificate_small_radius_margins_near_constant():
    cert = surgery.certify(3, 1.0)
    smallest = cert.normalized_margins()[-1]
    assert smallest == pytest.approx(0.75 * excess_constant(3), rel=1e-2)


def test_certificate_json_shape():
    cert = surgery.certify(2, 1.0)
    data = cert.to_json()
    assert set(data) == {"n", "a", "neck_rule", "r_star", "rows"}
    assert set(data["rows"][0]) == {"r", "R", "gain", "loss", "margin"}
    json.dumps(data)


def test_empty_grid_rejected():
    with pytest.raises(ConfigurationError):
        surgery.certify(3, 1.0, r_grid=[])
